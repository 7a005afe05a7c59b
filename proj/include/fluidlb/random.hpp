// Copyright 2026 The fluidlb Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Random problem instances for property checks.

#ifndef FLUIDLB_RANDOM_HPP
#define FLUIDLB_RANDOM_HPP

#include "fluidlb/model.hpp"

#include <random>

namespace fluidlb {

struct RandomScenarioOptions {
  int max_m = 4;
  int max_n = 4;
  double min_load = 0.3;   // sum(r) / sum(c)
  double max_load = 0.95;  // stays below the default 0.99 shrink factor
  double epsilon = kDefaultEpsilon;
};

// Strictly feasible instance with r in [0.5, 5] before rescaling to the
// drawn load, c in [1, 10] and tau in [0.5, 3].
inline Scenario<double> random_feasible_scenario(
    std::mt19937_64& rng, const RandomScenarioOptions& opts = {}) {
  std::uniform_int_distribution<int> dim_m(1, opts.max_m);
  std::uniform_int_distribution<int> dim_n(1, opts.max_n);
  std::uniform_real_distribution<double> rate(0.5, 5.0);
  std::uniform_real_distribution<double> cap(1.0, 10.0);
  std::uniform_real_distribution<double> setup(0.5, 3.0);
  std::uniform_real_distribution<double> load(opts.min_load, opts.max_load);

  const int m = dim_m(rng);
  const int n = dim_n(rng);
  ScenarioFields<double> f;
  f.r.resize(m);
  f.c.resize(n);
  f.tau.resize(m, n);
  for (int i = 0; i < m; ++i) f.r(i) = rate(rng);
  for (int j = 0; j < n; ++j) f.c(j) = cap(rng);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) f.tau(i, j) = setup(rng);
  f.r *= load(rng) * f.c.sum() / f.r.sum();
  f.epsilon = opts.epsilon;
  return validate_scenario(f);
}

}  // namespace fluidlb

#endif  // FLUIDLB_RANDOM_HPP
