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

#ifndef FLUIDLB_TESTS_HELPERS_HPP
#define FLUIDLB_TESTS_HELPERS_HPP

#include "fluidlb/io.hpp"

#include <doctest.h>

namespace fluidlb::test {

inline ScenarioFields<double> scen_a_fields() {
  ScenarioFields<double> f;
  f.r = Eigen::Vector2d(16, 8);
  f.c = Eigen::Vector2d(15, 10);
  f.tau.resize(2, 2);
  f.tau << 1, 2, 2, 1;
  f.epsilon = 0.01;
  return f;
}

inline ScenarioD scen_a() { return validate_scenario(scen_a_fields()); }

inline ScenarioD make_scenario(const Eigen::VectorXd& r, const Eigen::VectorXd& c,
                               const Eigen::MatrixXd& tau, double eps = 0.01) {
  ScenarioFields<double> f;
  f.r = r;
  f.c = c;
  f.tau = tau;
  f.epsilon = eps;
  return validate_scenario(f);
}

inline Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd x(2, 2);
  x << a, b, c, d;
  return x;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  return (a - b).cwiseAbs().maxCoeff();
}

// mu_1 = 1 - eps ln 15 balances x_12 / x_11 = 1 / 15 at x_11 = c_1.
inline double scen_a_mu1(double eps = 0.01) { return 1.0 - eps * std::log(15.0); }

}  // namespace fluidlb::test

#endif  // FLUIDLB_TESTS_HELPERS_HPP
