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

#include "helpers.hpp"

#include <cmath>

using namespace fluidlb;
using namespace fluidlb::test;

TEST_CASE("validated scenario stores gamma as the reciprocal of tau") {
  const ScenarioD s = scen_a();
  CHECK(max_abs_diff(s.gamma(), mat2(1, 0.5, 0.5, 1)) == 0.0);
  CHECK(s.gamma().cwiseProduct(s.tau()).isOnes(1e-15));
  CHECK(s.epsilon() == 0.01);
  CHECK(max_abs_diff(s.ctilde(), Eigen::Vector2d(14.85, 9.9)) < 1e-14);
}

TEST_CASE("validation rejects bad fields") {
  ScenarioFields<double> f = scen_a_fields();
  f.tau(0, 0) = 0.0;
  CHECK_THROWS_WITH_AS(validate_scenario(f), doctest::Contains("tau must be positive"),
                       ValidationError);

  f = scen_a_fields();
  f.ctilde = f.c;
  CHECK_THROWS_WITH_AS(validate_scenario(f),
                       doctest::Contains("ctilde must be strictly below c"),
                       ValidationError);

  f = scen_a_fields();
  f.r(1) = -1.0;
  CHECK_THROWS_WITH_AS(validate_scenario(f), doctest::Contains("r must be positive"),
                       ValidationError);

  f = scen_a_fields();
  f.epsilon = 0.0;
  CHECK_THROWS_AS(validate_scenario(f), ValidationError);

  f = scen_a_fields();
  f.ctilde_factor = 1.0;
  CHECK_THROWS_AS(validate_scenario(f), ValidationError);

  f = scen_a_fields();
  f.tau.resize(2, 3);
  f.tau.setOnes();
  CHECK_THROWS_AS(validate_scenario(f), ValidationError);

  f = scen_a_fields();
  f.c(0) = std::nan("");
  CHECK_THROWS_AS(validate_scenario(f), ValidationError);
}

TEST_CASE("feasibility report") {
  const auto rep = check_feasibility(scen_a());
  CHECK(rep.feasible);
  CHECK(rep.strictly_feasible);
  CHECK(rep.slack == 1.0);
  CHECK(rep.feasible_shrunk);
  CHECK(rep.slack_shrunk == doctest::Approx(0.75));

  const ScenarioD over = make_scenario(Eigen::Vector2d(25.0, 1.0),
                                       Eigen::Vector2d(15, 10), mat2(1, 2, 2, 1));
  CHECK_FALSE(check_feasibility(over).feasible);

  const ScenarioD edge = make_scenario(Eigen::Vector2d(20, 5),
                                       Eigen::Vector2d(15, 10), mat2(1, 2, 2, 1));
  CHECK(check_feasibility(edge).feasible);
  CHECK_FALSE(check_feasibility(edge).strictly_feasible);
  CHECK_FALSE(check_feasibility(edge).feasible_shrunk);
}

TEST_CASE("proportional feasible point") {
  const Eigen::MatrixXd x = proportional_feasible_point(scen_a());
  CHECK(max_abs_diff(x, mat2(9.6, 6.4, 4.8, 3.2)) < 1e-12);
  CHECK(x.colwise().sum()(0) <= 15.0);
  CHECK(x.colwise().sum()(1) <= 10.0);

  const ScenarioD one = make_scenario(Eigen::Vector2d(3, 4), Eigen::VectorXd::Constant(1, 9),
                                      Eigen::MatrixXd::Ones(2, 1));
  CHECK(max_abs_diff(proportional_feasible_point(one), Eigen::Vector2d(3, 4)) == 0.0);

  const ScenarioD equal = make_scenario(Eigen::Vector2d(3, 4), Eigen::Vector2d(5, 5),
                                        mat2(1, 2, 3, 4));
  CHECK(max_abs_diff(proportional_feasible_point(equal), mat2(1.5, 1.5, 2, 2)) == 0.0);

  const ScenarioD over = make_scenario(Eigen::Vector2d(25.0, 1.0),
                                       Eigen::Vector2d(15, 10), mat2(1, 2, 2, 1));
  CHECK_THROWS_AS(proportional_feasible_point(over), InfeasibleError);
}

TEST_CASE("setup and entropy costs") {
  const ScenarioD s = scen_a();
  CHECK(compute_costs(mat2(15, 1, 0, 8), s).setup_cost == doctest::Approx(25.0));
  CHECK(compute_costs(mat2(14.85, 1.15, 0, 8), s).setup_cost ==
        doctest::Approx(25.15));

  // Uniform split: eps r_i (-log n) per row.
  const CostReport<double> u = compute_costs(mat2(8, 8, 4, 4), s);
  CHECK(u.entropy_penalty == doctest::Approx(0.01 * 24.0 * -std::log(2.0)));
  CHECK(u.total == doctest::Approx(u.setup_cost + u.entropy_penalty));

  CHECK(compute_costs(mat2(16, 0, 0, 8), s).entropy_penalty == 0.0);
  CHECK_THROWS_AS(compute_costs(mat2(17, -1, 0, 8), s), ValidationError);
}

TEST_CASE("capacity and epsilon replacement") {
  const ScenarioD s = scen_a();
  const ScenarioD shrunk = s.with_capacities(s.ctilde());
  CHECK(max_abs_diff(shrunk.c(), s.ctilde()) == 0.0);
  CHECK(max_abs_diff(shrunk.ctilde(), 0.99 * s.ctilde()) < 1e-12);
  CHECK(s.with_epsilon(0.1).epsilon() == 0.1);
  const Scenario<long double> ld = s.cast<long double>();
  CHECK(double(ld.r()(0)) == 16.0);
}
