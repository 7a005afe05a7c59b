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

// Fixed-step integration of the myopic, proximal and delayed-arrival fluid
// dynamics, trajectory recording, equilibrium detection and Lyapunov
// monitors.

#ifndef FLUIDLB_SIM_HPP
#define FLUIDLB_SIM_HPP

#include "fluidlb/model.hpp"
#include "fluidlb/proximal.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace fluidlb {

using ScenarioD = Scenario<double>;

enum class Policy { kMyopic, kProximal, kMyopicDelayed };

std::string to_string(Policy p);
Policy policy_from_string(const std::string& name);

// Pool queues q (n), setup queues z (m x n) and multipliers nu (n). The
// myopic policies carry no setup queues or multipliers; z and nu are empty.
struct SystemState {
  Eigen::VectorXd q;
  Eigen::MatrixXd z;
  Eigen::VectorXd nu;
};

SystemState zero_state(Policy p, const ScenarioD& s);

// A saddle point (Zhat, nuhat) of the reduced Lagrangian.
struct Saddle {
  Eigen::MatrixXd z;
  Eigen::VectorXd nu;
};

struct StepSignals {
  Eigen::MatrixXd x;  // routing rates in force at this state
  double setup_cost = 0.0;
  // D(mu(q)) for the myopic policies, distance to the reference saddle for
  // the proximal one; NaN when no reference saddle was supplied.
  double lyapunov = 0.0;
};

struct TrajectoryMeta {
  Policy policy = Policy::kMyopic;
  double dt = 0.0;
  long stride = 1;
  std::uint64_t scenario_hash = 0;
};

// Recorded every `stride` integrator steps, including t = 0.
struct Trajectory {
  std::vector<double> times;
  std::vector<SystemState> states;
  std::vector<StepSignals> signals;
  TrajectoryMeta meta;
  std::optional<Saddle> reference;  // proximal runs only

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

struct IntegrateOptions {
  double dt = 1e-3;
  double T = 60.0;
  long stride = 1;
  std::optional<Saddle> reference;
};

// Largest step accepted for the myopic policies:
// eps * min_j c_j / (2 max_i r_i).
double myopic_dt_limit(const ScenarioD& s);

std::uint64_t scenario_hash(const ScenarioD& s);

// Classic RK4 with q and z clipped at zero after every stage; the
// nu-projection lives inside the field itself.
Trajectory integrate(Policy policy, const SystemState& state0,
                     const ScenarioD& s, const IntegrateOptions& opts);

// Past routing rates x_ij on a dt grid, one ring buffer per (i, j) of
// length round(tau_ij / dt) >= 1.
class DelayLine {
 public:
  DelayLine(const ScenarioD& s, double dt, const Eigen::MatrixXd& fill);

  // Delay of (i, j) in whole steps.
  long lag(Eigen::Index i, Eigen::Index j) const;

  // x_ij at step k - lag + theta, theta in [0, 1], given that rates up to
  // the current step k have been pushed. Linear in theta.
  double delayed(Eigen::Index i, Eigen::Index j, double theta) const;

  // Appends the rates of the newest step.
  void push(const Eigen::MatrixXd& x);

 private:
  Eigen::Index m_ = 0;
  Eigen::Index n_ = 0;
  std::vector<long> lags_;
  std::vector<std::deque<double>> buffers_;
};

enum class DelayHistory { kZeros, kRates };

struct DelayedOptions {
  IntegrateOptions integrate;
  DelayHistory history = DelayHistory::kZeros;
  Eigen::MatrixXd history_rates;  // used with kRates
};

// Myopic routing where pool j receives x_ij(t - tau_ij).
Trajectory integrate_delayed(const SystemState& state0, const ScenarioD& s,
                             const DelayedOptions& opts);

// Norm of the instantaneous field at a recorded state (myopic, proximal) or
// of the finite-difference derivative (delayed). Index into traj.
double field_norm_at(const Trajectory& traj, const ScenarioD& s,
                     std::size_t k);

// Final state if the field norm stays below tol over the trailing window
// (seconds); nullopt otherwise.
std::optional<SystemState> detect_equilibrium(const Trajectory& traj,
                                              const ScenarioD& s, double tol,
                                              double window);

enum class LyapunovKind { kDualOfMu, kSaddleDistance };

struct MonotonicityReport {
  LyapunovKind kind = LyapunovKind::kDualOfMu;
  std::vector<double> values;
  std::vector<double> deltas;  // values[k+1] - values[k]
  double slack = 1e-6;
  long violations = 0;
  double worst_violation = 0.0;
};

// D(mu(q)) must not decrease along myopic runs; the saddle distance must not
// increase along proximal runs. Violations are steps that move the wrong way
// by more than slack.
MonotonicityReport monitor_lyapunov(const Trajectory& traj, const ScenarioD& s,
                                    LyapunovKind kind,
                                    std::optional<Saddle> reference = {},
                                    double slack = 1e-6);

struct SaddleSearchOptions {
  double dt = 1e-2;
  double t_max = 5000.0;
  double tol = 1e-8;
};

// Runs the saddle dynamics from Z = 0, nu = 0 until the field norm drops
// below tol. Throws SolverError when t_max is reached first.
Saddle find_reference_saddle(const ScenarioD& s,
                             const Eigen::VectorXd& capacities,
                             const SaddleSearchOptions& opts = {});

struct ProximalEquilibrium {
  Eigen::VectorXd q;
  Eigen::MatrixXd z;
  Eigen::VectorXd nu;
  Eigen::MatrixXd x;
  Eigen::VectorXd capacities;  // targets of the virtual queues
  double time = 0.0;           // settling time
  double field_norm = 0.0;
  ProximalKkt<double> kkt;
  CostReport<double> costs;
};

struct SettleOptions {
  double dt = 1e-2;
  double t_max = 5000.0;
  double tol = 1e-8;
};

// Integrates the pool queues together with the saddle dynamics, whose
// virtual queues drain at `capacities` (ctilde for the shrunk problem, c
// otherwise), from the zero state until the full field norm drops below tol.
ProximalEquilibrium settle_proximal(const ScenarioD& s,
                                    const Eigen::VectorXd& capacities,
                                    const SettleOptions& opts = {});

}  // namespace fluidlb

#endif  // FLUIDLB_SIM_HPP
