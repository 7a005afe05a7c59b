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

#include "fluidlb/random.hpp"

using namespace fluidlb;
using namespace fluidlb::test;

namespace {

const Trajectory& scen_a_myopic() {
  static const Trajectory traj = [] {
    IntegrateOptions opts;
    opts.dt = 1e-3;
    opts.T = 60.0;
    opts.stride = 50;
    const ScenarioD s = scen_a();
    return integrate(Policy::kMyopic, zero_state(Policy::kMyopic, s), s, opts);
  }();
  return traj;
}

const Trajectory& scen_a_proximal() {
  static const Trajectory traj = [] {
    const ScenarioD s = scen_a();
    IntegrateOptions opts;
    opts.dt = 1e-3;
    opts.T = 200.0;
    opts.stride = 100;
    opts.reference = find_reference_saddle(s, s.ctilde());
    return integrate(Policy::kProximal, zero_state(Policy::kProximal, s), s, opts);
  }();
  return traj;
}

}  // namespace

TEST_CASE("policy names round-trip") {
  for (Policy p : {Policy::kMyopic, Policy::kProximal, Policy::kMyopicDelayed})
    CHECK(policy_from_string(to_string(p)) == p);
  CHECK(to_string(Policy::kMyopicDelayed) == "myopic-delayed");
  CHECK_THROWS_AS(policy_from_string("greedy"), ValidationError);
}

TEST_CASE("myopic run converges to the dual equilibrium") {
  const ScenarioD s = scen_a();
  const Trajectory& traj = scen_a_myopic();
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == doctest::Approx(60.0));
  CHECK(traj.meta.scenario_hash == scenario_hash(s));
  CHECK(max_abs_diff(traj.signals.back().x, mat2(15, 1, 0, 8)) < 0.1);
  CHECK((traj.states.back().q - Eigen::Vector2d(30, 9)).cwiseAbs().maxCoeff() < 0.5);
  CHECK(max_abs_diff(traj.states.back().q, solve_equilibrium(s).q_star) < 1e-6);
  for (const SystemState& x : traj.states) CHECK((x.q.array() >= 0.0).all());
}

TEST_CASE("proximal run converges below capacity") {
  const ScenarioD s = scen_a();
  const Trajectory& traj = scen_a_proximal();
  CHECK(max_abs_diff(traj.signals.back().x, mat2(14.85, 1.15, 0, 8)) < 0.1);
  CHECK((traj.states.back().q.array() < s.c().array()).all());
  CHECK(traj.signals.back().setup_cost == doctest::Approx(25.15).epsilon(1e-4));
  for (const SystemState& x : traj.states) {
    CHECK((x.z.array() >= 0.0).all());
    CHECK((x.nu.array() >= 0.0).all());
  }
}

TEST_CASE("one step from an equilibrium stays put") {
  const ScenarioD s = scen_a();
  SystemState x0 = zero_state(Policy::kMyopic, s);
  x0.q = polish_myopic_fixed_point(solve_equilibrium(s).q_star, s);
  IntegrateOptions opts;
  opts.dt = 1e-3;
  opts.T = 1e-3;
  const Trajectory traj = integrate(Policy::kMyopic, x0, s, opts);
  REQUIRE(traj.size() == 2);
  CHECK(max_abs_diff(traj.states.back().q, x0.q) < 1e-9);

  const ProximalEquilibrium eq = settle_proximal(s, s.ctilde());
  const SystemState p0{eq.q, eq.z, eq.nu};
  const Trajectory pt = integrate(Policy::kProximal, p0, s, opts);
  CHECK(max_abs_diff(pt.states.back().q, eq.q) < 1e-9);
  CHECK(max_abs_diff(pt.states.back().z, eq.z) < 1e-9);
}

TEST_CASE("step-size guard") {
  const ScenarioD s = scen_a();
  CHECK(myopic_dt_limit(s) == doctest::Approx(0.003125));
  IntegrateOptions opts;
  opts.dt = 0.01;
  opts.T = 1.0;
  try {
    integrate(Policy::kMyopic, zero_state(Policy::kMyopic, s), s, opts);
    FAIL("expected a stability error");
  } catch (const StabilityError& e) {
    CHECK(e.suggested_dt() == doctest::Approx(0.003125));
  }
  opts.dt = -1.0;
  CHECK_THROWS_AS(integrate(Policy::kMyopic, zero_state(Policy::kMyopic, s), s, opts),
                  ValidationError);
}

TEST_CASE("state shape checks") {
  const ScenarioD s = scen_a();
  IntegrateOptions opts;
  opts.T = 0.01;
  SystemState bad = zero_state(Policy::kMyopic, s);
  bad.q(0) = -1.0;
  CHECK_THROWS_AS(integrate(Policy::kMyopic, bad, s, opts), ValidationError);
  CHECK_THROWS_AS(integrate(Policy::kProximal, zero_state(Policy::kMyopic, s), s, opts),
                  ValidationError);
}

TEST_CASE("delay line") {
  const ScenarioD s = scen_a();
  DelayLine line(s, 0.5, mat2(1, 2, 3, 4));
  CHECK(line.lag(0, 0) == 2);
  CHECK(line.lag(0, 1) == 4);
  CHECK(line.delayed(0, 0, 0.0) == 1.0);
  line.push(mat2(5, 6, 7, 8));     // step 0
  line.push(mat2(9, 10, 11, 12));  // step 1
  // At step 1 a two-step lag reaches back to step -1, still history.
  CHECK(line.delayed(0, 0, 0.0) == 1.0);
  CHECK(line.delayed(0, 0, 0.5) == 3.0);
  line.push(mat2(13, 14, 15, 16));  // step 2
  CHECK(line.delayed(0, 0, 0.0) == 5.0);
  CHECK(line.delayed(0, 0, 0.5) == 7.0);
  CHECK(line.delayed(0, 1, 1.0) == 2.0);
  CHECK_THROWS_AS(DelayLine(s, 0.3, mat2(1, 2, 3, 4)), ValidationError);
}

TEST_CASE("warm-started delayed run is stationary") {
  const ScenarioD s = scen_a();
  const Eigen::VectorXd q = polish_myopic_fixed_point(solve_equilibrium(s).q_star, s);
  DelayedOptions opts;
  opts.integrate.dt = 1e-3;
  opts.integrate.T = 20.0;
  opts.integrate.stride = 100;
  opts.history = DelayHistory::kRates;
  opts.history_rates = myopic_rates<double>(waiting_time(q, s.c()), s);
  SystemState x0 = zero_state(Policy::kMyopicDelayed, s);
  x0.q = q;
  const Trajectory traj = integrate_delayed(x0, s, opts);
  for (const SystemState& x : traj.states) CHECK(max_abs_diff(x.q, q) < 1e-6);
}

TEST_CASE("cold delayed run is recorded but not declared converged") {
  const ScenarioD s = scen_a();
  IntegrateOptions opts;
  opts.dt = 1e-3;
  opts.T = 60.0;
  opts.stride = 10;
  const Trajectory traj =
      integrate(Policy::kMyopicDelayed, zero_state(Policy::kMyopicDelayed, s), s, opts);
  CHECK(traj.meta.policy == Policy::kMyopicDelayed);
  CHECK(traj.times.back() == doctest::Approx(60.0));
  CHECK_FALSE(detect_equilibrium(traj, s, 1e-3, 5.0).has_value());
  CHECK_THROWS_AS(monitor_lyapunov(traj, s, LyapunovKind::kDualOfMu), ValidationError);
}

TEST_CASE("small delays track the undelayed run") {
  Eigen::MatrixXd tau(2, 2);
  tau << 1e-3, 2e-3, 2e-3, 1e-3;
  const ScenarioD s = make_scenario(Eigen::Vector2d(16, 8), Eigen::Vector2d(15, 10), tau);
  IntegrateOptions opts;
  opts.dt = 1e-3;
  opts.T = 2.0;
  const Trajectory plain = integrate(Policy::kMyopic, zero_state(Policy::kMyopic, s), s, opts);
  const Trajectory late =
      integrate(Policy::kMyopicDelayed, zero_state(Policy::kMyopicDelayed, s), s, opts);
  REQUIRE(plain.size() == late.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < plain.size(); ++k)
    worst = std::max(worst, max_abs_diff(plain.states[k].q, late.states[k].q) /
                                std::max(plain.times[k], 1.0));
  // Arrivals lag by at most two steps of r = 24.
  CHECK(worst < 2 * 24 * opts.dt * 1.01);
}

TEST_CASE("equilibrium detection") {
  const ScenarioD s = scen_a();
  const auto eq = detect_equilibrium(scen_a_myopic(), s, 1e-3, 5.0);
  REQUIRE(eq.has_value());
  CHECK((eq->q - Eigen::Vector2d(30, 9)).cwiseAbs().maxCoeff() < 0.5);

  IntegrateOptions opts;
  opts.T = 0.1;
  const Trajectory brief = integrate(Policy::kMyopic, zero_state(Policy::kMyopic, s), s, opts);
  CHECK_FALSE(detect_equilibrium(brief, s, 1e-3, 5.0).has_value());
}

TEST_CASE("Lyapunov monitors") {
  const ScenarioD s = scen_a();
  const MonotonicityReport my = monitor_lyapunov(scen_a_myopic(), s, LyapunovKind::kDualOfMu);
  CHECK(my.violations == 0);
  CHECK(my.values.size() == scen_a_myopic().size());
  CHECK(my.deltas.size() + 1 == my.values.size());

  const MonotonicityReport px =
      monitor_lyapunov(scen_a_proximal(), s, LyapunovKind::kSaddleDistance);
  CHECK(px.violations == 0);
  CHECK(px.values.back() < 1e-6);
  CHECK_THROWS_AS(monitor_lyapunov(scen_a_myopic(), s, LyapunovKind::kSaddleDistance),
                  ValidationError);

  // Start at the fixed point: every delta is zero.
  SystemState x0 = zero_state(Policy::kMyopic, s);
  x0.q = polish_myopic_fixed_point(solve_equilibrium(s).q_star, s);
  IntegrateOptions opts;
  opts.T = 1.0;
  opts.stride = 100;
  const Trajectory flat = integrate(Policy::kMyopic, x0, s, opts);
  for (double d : monitor_lyapunov(flat, s, LyapunovKind::kDualOfMu).deltas)
    CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("monotonicity on random instances") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 3; ++k) {
    const ScenarioD s = random_feasible_scenario(rng);
    IntegrateOptions opts;
    opts.dt = std::min(1e-3, myopic_dt_limit(s));
    opts.T = 10.0;
    opts.stride = 5;
    const Trajectory t = integrate(Policy::kMyopic, zero_state(Policy::kMyopic, s), s, opts);
    CHECK(monitor_lyapunov(t, s, LyapunovKind::kDualOfMu).violations == 0);
  }
}

TEST_CASE("random scenarios are strictly feasible and bounded") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const ScenarioD s = random_feasible_scenario(rng);
    CHECK(s.m() <= 4);
    CHECK(s.n() <= 4);
    CHECK(check_feasibility(s).strictly_feasible_shrunk);
  }
}
