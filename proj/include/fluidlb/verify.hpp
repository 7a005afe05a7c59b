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

// Randomized property checks against independent oracles. Each check
// returns the worst observed error next to its threshold.

#ifndef FLUIDLB_VERIFY_HPP
#define FLUIDLB_VERIFY_HPP

#include "fluidlb/sim.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fluidlb {

struct PropertyResult {
  std::string name;
  bool passed = true;
  long cases = 0;
  long failures = 0;
  double worst = 0.0;      // largest error seen
  double threshold = 0.0;  // error above which a case fails
  std::string detail;      // first failing case, if any
};

enum class Fault { kNone, kGradient };

Fault fault_from_string(const std::string& name);

// phi(y) in [min y - eps log n, min y], no slack.
PropertyResult check_softmin_bracket(std::mt19937_64& rng, long count);
// phi(y + a 1) = phi(y) + a to 1e-12.
PropertyResult check_translation_identity(std::mt19937_64& rng, long count);
// softmin_gradient vs the direct softmax and central differences.
PropertyResult check_softmin_gradient(std::mt19937_64& rng, long count);

// dual_gradient vs central differences of dual_value, relative error
// below 1e-6. Fault::kGradient perturbs the gradient under test.
PropertyResult check_dual_gradient(const ScenarioD& s, std::mt19937_64& rng,
                                   long points, Fault fault = Fault::kNone);
// Midpoint concavity of D on random segments.
PropertyResult check_dual_concavity(const ScenarioD& s, std::mt19937_64& rng,
                                    long segments);
// reduced_gradients vs central differences of reduced_lagrangian, relative
// error below 1e-5.
PropertyResult check_reduced_gradients(const ScenarioD& s,
                                       std::mt19937_64& rng, long points);

// Dispatcher QP (n <= 6) against the projected-gradient oracle, 1e-6.
PropertyResult check_qp_oracle(std::mt19937_64& rng, long count);
// KKT residual of the exact dispatcher QP solution, 1e-10.
PropertyResult check_qp_kkt(std::mt19937_64& rng, long count);

// solve_equilibrium KKT residuals and the myopic field at the polished q*.
PropertyResult check_kkt_round_trip(const ScenarioD& s);

// check_feasibility agrees with proportional_feasible_point on integer
// instances that straddle sum(r) = sum(c).
PropertyResult check_feasibility_characterization(std::mt19937_64& rng,
                                                  long count);

struct VerifyOptions {
  std::uint64_t seed = 20260101;
  long random_scenarios = 50;
  long random_cases = 200;
  Fault fault = Fault::kNone;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;

  bool passed() const;
  std::vector<std::string> failing() const;
};

// The whole suite on `s` plus opts.random_scenarios random feasible
// instances with m, n <= 4.
VerifyReport run_verification(const ScenarioD& s, const VerifyOptions& opts);

std::string verify_report_text(const VerifyReport& rep);

}  // namespace fluidlb

#endif  // FLUIDLB_VERIFY_HPP
