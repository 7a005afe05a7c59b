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

#include "fluidlb/oracles.hpp"

using namespace fluidlb;
using namespace fluidlb::test;

TEST_CASE("dispatcher QP closed cases") {
  const Eigen::VectorXd one = solve_dispatcher_qp<double>(
      Eigen::VectorXd::Constant(1, 0.4), Eigen::VectorXd::Constant(1, 9),
      Eigen::VectorXd::Constant(1, 3), 2.5).x;
  CHECK(one(0) == 2.5);

  const Eigen::VectorXd sym = solve_dispatcher_qp<double>(
      Eigen::Vector2d(1, 1), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), 2.0).x;
  CHECK(max_abs_diff(sym, Eigen::Vector2d(1, 1)) < 1e-15);
}

TEST_CASE("dispatcher QP against the projected-gradient oracle") {
  const Eigen::Vector2d gamma(1, 0.5), z(10, 10), nu(0, 0);
  const Eigen::VectorXd x = solve_dispatcher_qp<double>(gamma, z, nu, 4.0).x;
  const Eigen::VectorXd ref = oracle::brute_force_dispatcher_qp<double>(gamma, z, nu, 4.0);
  CHECK(max_abs_diff(x, ref) < 1e-8);
  CHECK(x.sum() == doctest::Approx(4.0));
}

TEST_CASE("proximal rates at zero state") {
  const ScenarioD s = scen_a();
  const Eigen::MatrixXd x = proximal_rates<double>(Eigen::MatrixXd::Zero(2, 2),
                                                   Eigen::Vector2d::Zero(), s);
  for (int i = 0; i < 2; ++i) {
    const Eigen::VectorXd ref = oracle::brute_force_dispatcher_qp<double>(
        s.gamma().row(i).transpose(), Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(),
        s.r()(i));
    CHECK(max_abs_diff(x.row(i).transpose(), ref) < 1e-9);
  }
  CHECK(x.rowwise().sum().isApprox(s.r(), 1e-15));
}

TEST_CASE("symmetric scenario gives symmetric rates") {
  const ScenarioD s = make_scenario(Eigen::Vector2d(3, 3), Eigen::Vector2d(5, 5),
                                    mat2(1, 2, 2, 1));
  const Eigen::MatrixXd x = proximal_rates<double>(mat2(1, 2, 2, 1),
                                                   Eigen::Vector2d(0.5, 0.5), s);
  CHECK(x(0, 0) == doctest::Approx(x(1, 1)));
  CHECK(x(0, 1) == doctest::Approx(x(1, 0)));
}

TEST_CASE("reduced Lagrangian without the proximal penalty") {
  const ScenarioD s = scen_a();
  // Every type on its cheapest pool: Xbar = g Z, so only sum tau x remains.
  const Eigen::MatrixXd z = mat2(16, 0, 0, 8);
  const Eigen::Vector2d nu = Eigen::Vector2d::Zero();
  CHECK(max_abs_diff(proximal_rates<double>(z, nu, s), s.gamma().cwiseProduct(z)) < 1e-12);
  CHECK(reduced_lagrangian<double>(z, nu, s, s.c()) == doctest::Approx(24.0));

  // nu = (1, 0) ties the delays of type 1, so any split of it is a fixed point.
  const Eigen::MatrixXd zt = mat2(10, 12, 0, 8);
  const Eigen::Vector2d nut(1, 0);
  const Eigen::MatrixXd x = proximal_rates<double>(zt, nut, s);
  CHECK(max_abs_diff(x, s.gamma().cwiseProduct(zt)) < 1e-12);
  CHECK(reduced_lagrangian<double>(zt, nut, s, s.c()) ==
        doctest::Approx(x.cwiseQuotient(s.gamma()).sum() + (x.col(0).sum() - 15.0)));
}

TEST_CASE("convex in Z, concave in nu") {
  const ScenarioD s = scen_a();
  const Eigen::VectorXd caps = s.ctilde();
  const Eigen::MatrixXd za = mat2(1, 4, 0, 2), zb = mat2(6, 0, 3, 9);
  const Eigen::Vector2d na(0.2, 1.5), nb(2.0, 0.0);
  auto L = [&](const Eigen::MatrixXd& z, const Eigen::VectorXd& nu) {
    return reduced_lagrangian<double>(z, nu, s, caps);
  };
  CHECK(L(0.5 * (za + zb), na) <= 0.5 * (L(za, na) + L(zb, na)) + 1e-12);
  CHECK(L(za, 0.5 * (na + nb)) >= 0.5 * (L(za, na) + L(za, nb)) - 1e-12);
}

TEST_CASE("reduced gradients against finite differences") {
  const ScenarioD s = scen_a();
  const Scenario<long double> sl = s.cast<long double>();
  using ML = Matrix<long double>;
  using VL = Vector<long double>;
  const VL caps = sl.ctilde();
  const ML z = mat2(3.5, 2.0, 0.5, 7.0).cast<long double>();
  const VL nu = Eigen::Vector2d(0.4, 0.1).cast<long double>();
  const ReducedGradients<long double> g = reduced_gradients(z, nu, sl, caps);
  const ML fdz = oracle::central_difference(
      [&](const ML& v) { return reduced_lagrangian(v, nu, sl, caps); }, z, 1e-7L);
  const VL fdn = oracle::central_difference(
      [&](const VL& v) { return reduced_lagrangian(z, v, sl, caps); }, nu, 1e-7L);
  CHECK(double((g.dz - fdz).cwiseAbs().maxCoeff()) < 1e-8);
  CHECK(double((g.dnu - fdn).cwiseAbs().maxCoeff()) < 1e-8);
}

TEST_CASE("empty column gives minus the capacity") {
  const ScenarioD s = scen_a();
  // A large price on pool 2 and no setup backlog there pushes its column to 0.
  const ReducedGradients<double> g = reduced_gradients<double>(
      mat2(20, 0, 10, 0), Eigen::Vector2d(0, 50), s, s.c());
  CHECK(g.dnu(1) == doctest::Approx(-10.0));
}

TEST_CASE("saddle field projection and zero state") {
  const ScenarioD s = scen_a();
  const SaddleField<double> f = saddle_field<double>(Eigen::MatrixXd::Zero(2, 2),
                                                     Eigen::Vector2d::Zero(), s, s.ctilde());
  CHECK((f.dz.array() >= 0.0).all());
  CHECK(max_abs_diff(f.dz, f.x) == 0.0);

  const ScenarioD light = make_scenario(Eigen::Vector2d(1, 1), Eigen::Vector2d(15, 10),
                                        mat2(1, 2, 2, 1));
  const SaddleField<double> g = saddle_field<double>(Eigen::MatrixXd::Zero(2, 2),
                                                     Eigen::Vector2d::Zero(), light,
                                                     light.ctilde());
  CHECK(g.dnu.isZero(0.0));
  CHECK(positive_projection(-1.0, 0.0) == 0.0);
  CHECK(positive_projection(-1.0, 0.5) == -1.0);
  CHECK(positive_projection(2.0, 0.0) == 2.0);
}

TEST_CASE("combined field at the shrunk equilibrium") {
  const ScenarioD s = scen_a();
  const ProximalEquilibrium eq = settle_proximal(s, s.ctilde());
  CHECK(max_abs_diff(eq.x, mat2(14.85, 1.15, 0, 8)) < 1e-6);
  CHECK(eq.costs.setup_cost == doctest::Approx(25.15).epsilon(1e-8));
  const CombinedField<double> f = combined_field<double>(eq.q, eq.z, eq.nu, s);
  CHECK(f.dq.norm() < 1e-6);
  CHECK(f.dz.norm() < 1e-6);
  CHECK(f.dnu.norm() < 1e-6);
  CHECK(max_abs_diff(eq.q, s.gamma().cwiseProduct(eq.z).colwise().sum().transpose()) < 1e-6);
  CHECK((eq.q.array() < s.c().array()).all());
  CHECK(eq.kkt.max() < 1e-6);

  const ReducedGradients<double> g = reduced_gradients(eq.z, eq.nu, s, s.ctilde());
  CHECK(g.dz.cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(g.dnu(0)) < 1e-6);  // nu_1 > 0
}

TEST_CASE("combined field edge cases") {
  const ScenarioD s = scen_a();
  const CombinedField<double> empty = combined_field<double>(
      Eigen::Vector2d::Zero(), mat2(1, 2, 3, 4), Eigen::Vector2d::Zero(), s);
  CHECK((empty.dq.array() >= 0.0).all());
  const CombinedField<double> drain = combined_field<double>(
      Eigen::Vector2d(20, 4), Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d::Zero(), s);
  CHECK(max_abs_diff(drain.dq, Eigen::Vector2d(-15, -4)) == 0.0);
}

TEST_CASE("saddle distance") {
  const Eigen::MatrixXd z = mat2(1, 2, 3, 4);
  const Eigen::Vector2d nu(0.5, 0.25);
  CHECK(lyapunov_distance<double>(z, nu, z, nu) == 0.0);
  CHECK(lyapunov_distance<double>(2 * z, nu, z, nu) == doctest::Approx(0.5 * z.squaredNorm()));
}
