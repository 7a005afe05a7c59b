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

using namespace fluidlb;
using namespace fluidlb::test;

TEST_CASE("waiting time is the scaled queue excess") {
  const Eigen::Vector2d c(15, 10);
  CHECK(waiting_time<double>(c, c).isZero(0.0));
  CHECK(max_abs_diff(waiting_time<double>(2 * c, c), Eigen::Vector2d(1, 1)) == 0.0);
  CHECK(max_abs_diff(waiting_time<double>(Eigen::Vector2d(30, 9), c),
                     Eigen::Vector2d(1, 0)) == 0.0);
  CHECK_THROWS_AS(waiting_time<double>(Eigen::Vector2d(-1, 0), c), ValidationError);
}

TEST_CASE("myopic rates") {
  const ScenarioD s = scen_a();
  const Eigen::MatrixXd tied = myopic_rates<double>(Eigen::Vector2d(1, 0), s);
  CHECK(tied(0, 0) == doctest::Approx(8.0));
  CHECK(tied(0, 1) == doctest::Approx(8.0));
  CHECK(tied(1, 0) < 1e-12);
  CHECK(tied(1, 1) == doctest::Approx(8.0));

  const Eigen::MatrixXd idle = myopic_rates<double>(Eigen::Vector2d::Zero(), s);
  CHECK(std::abs(idle(0, 0) - 16.0) < 1e-6);
  CHECK(idle.rowwise().sum().isApprox(s.r(), 1e-15));

  const ScenarioD one = make_scenario(Eigen::Vector2d(3, 4), Eigen::VectorXd::Constant(1, 9),
                                      Eigen::MatrixXd::Ones(2, 1));
  CHECK(max_abs_diff(myopic_rates<double>(Eigen::VectorXd::Constant(1, 0.7), one),
                     Eigen::Vector2d(3, 4)) < 1e-15);
}

TEST_CASE("myopic field") {
  const ScenarioD s = scen_a();
  const Eigen::VectorXd f0 = myopic_field<double>(Eigen::Vector2d::Zero(), s);
  CHECK(std::abs(f0(0) - 16.0) < 1e-6);
  CHECK(std::abs(f0(1) - 8.0) < 1e-6);

  const Eigen::VectorXd huge = myopic_field<double>(Eigen::Vector2d(1e4, 1e4), s);
  CHECK(huge.sum() == doctest::Approx(24.0 - 25.0));

  // The fixed point sits at q_1 = 15 (1 + mu_1), not at 30.
  const Eigen::Vector2d q_star(15.0 * (1.0 + scen_a_mu1()), 9.0);
  CHECK(myopic_field<double>(q_star, s).norm() < 1e-9);
  CHECK(myopic_field<double>(Eigen::Vector2d(30, 9), s).norm() > 1.0);
}

TEST_CASE("analytic jacobian matches finite differences") {
  const ScenarioD s = scen_a();
  for (const Eigen::Vector2d& q : {Eigen::Vector2d(20, 12), Eigen::Vector2d(29.6, 10.05),
                                  Eigen::Vector2d(40, 14)}) {
    const Eigen::MatrixXd jac = myopic_jacobian<double>(q, s);
    const double h = 1e-6;
    Eigen::MatrixXd fd(2, 2);
    for (int k = 0; k < 2; ++k) {
      const Eigen::Vector2d e = h * Eigen::Vector2d::Unit(k);
      fd.col(k) = (myopic_field<double>(q + e, s) - myopic_field<double>(q - e, s)) / (2 * h);
    }
    CHECK(max_abs_diff(jac, fd) < 1e-5 * std::max(1.0, jac.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("polishing drives the field to round-off") {
  const ScenarioD s = scen_a();
  const Eigen::VectorXd q = polish_myopic_fixed_point<double>(Eigen::Vector2d(29.5, 9.1), s);
  CHECK(myopic_field(q, s).norm() < 1e-12);
  CHECK(q(0) == doctest::Approx(15.0 * (1.0 + scen_a_mu1())).epsilon(1e-12));
}

TEST_CASE("hard myopic choice") {
  const ScenarioD s = scen_a();
  using Choice = std::vector<Eigen::Index>;
  CHECK(hard_myopic_choice<double>(Eigen::Vector2d(0, 0), s) == Choice{0, 1});
  CHECK(hard_myopic_choice<double>(Eigen::Vector2d(1, 0), s) == Choice{0, 1});
  CHECK(hard_myopic_choice<double>(Eigen::Vector2d(2, 0), s) == Choice{1, 1});
}
