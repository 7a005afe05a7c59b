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

#include "fluidlb/sim.hpp"

#include "fluidlb/equilibrium.hpp"
#include "fluidlb/myopic.hpp"
#include "fluidlb/proximal.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

namespace fluidlb {

std::string to_string(Policy p) {
  switch (p) {
    case Policy::kMyopic:
      return "myopic";
    case Policy::kProximal:
      return "proximal";
    case Policy::kMyopicDelayed:
      return "myopic-delayed";
  }
  return "unknown";
}

Policy policy_from_string(const std::string& name) {
  if (name == "myopic") return Policy::kMyopic;
  if (name == "proximal") return Policy::kProximal;
  if (name == "myopic-delayed") return Policy::kMyopicDelayed;
  throw ValidationError("unknown policy '" + name + "'");
}

SystemState zero_state(Policy p, const ScenarioD& s) {
  SystemState st;
  st.q = Eigen::VectorXd::Zero(s.n());
  if (p == Policy::kProximal) {
    st.z = Eigen::MatrixXd::Zero(s.m(), s.n());
    st.nu = Eigen::VectorXd::Zero(s.n());
  }
  return st;
}

double myopic_dt_limit(const ScenarioD& s) {
  return s.epsilon() * s.c().minCoeff() / (2.0 * s.r().maxCoeff());
}

std::uint64_t scenario_hash(const ScenarioD& s) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    for (unsigned char b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  };
  mix(static_cast<double>(s.m()));
  mix(static_cast<double>(s.n()));
  for (Eigen::Index i = 0; i < s.m(); ++i) mix(s.r()(i));
  for (Eigen::Index j = 0; j < s.n(); ++j) mix(s.c()(j));
  for (Eigen::Index i = 0; i < s.m(); ++i)
    for (Eigen::Index j = 0; j < s.n(); ++j) mix(s.tau()(i, j));
  mix(s.epsilon());
  for (Eigen::Index j = 0; j < s.n(); ++j) mix(s.ctilde()(j));
  return h;
}

namespace {

struct Derivative {
  Eigen::VectorXd q;
  Eigen::MatrixXd z;
  Eigen::VectorXd nu;
};

SystemState advance(const SystemState& x, const Derivative& d, double h) {
  SystemState out;
  out.q = (x.q + h * d.q).cwiseMax(0.0);
  if (x.z.size() > 0) out.z = (x.z + h * d.z).cwiseMax(0.0);
  if (x.nu.size() > 0) out.nu = (x.nu + h * d.nu).cwiseMax(0.0);
  return out;
}

Derivative combine(const Derivative& k1, const Derivative& k2,
                   const Derivative& k3, const Derivative& k4) {
  Derivative d;
  d.q = (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q) / 6.0;
  if (k1.z.size() > 0) d.z = (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z) / 6.0;
  if (k1.nu.size() > 0)
    d.nu = (k1.nu + 2.0 * k2.nu + 2.0 * k3.nu + k4.nu) / 6.0;
  return d;
}

bool all_finite(const SystemState& x) {
  return x.q.allFinite() && x.z.allFinite() && x.nu.allFinite();
}

// field(state, theta) with theta the fractional position inside the step.
template <typename Field>
SystemState rk4_step(const SystemState& x, double dt, Field&& field) {
  const Derivative k1 = field(x, 0.0);
  const Derivative k2 = field(advance(x, k1, 0.5 * dt), 0.5);
  const Derivative k3 = field(advance(x, k2, 0.5 * dt), 0.5);
  const Derivative k4 = field(advance(x, k3, dt), 1.0);
  return advance(x, combine(k1, k2, k3, k4), dt);
}

Derivative myopic_derivative(const SystemState& x, const ScenarioD& s) {
  return {myopic_field(x.q, s), {}, {}};
}

Derivative proximal_derivative(const SystemState& x, const ScenarioD& s) {
  CombinedField<double> f = combined_field(x.q, x.z, x.nu, s);
  return {std::move(f.dq), std::move(f.dz), std::move(f.dnu)};
}

void check_state_shape(Policy policy, const SystemState& st,
                       const ScenarioD& s) {
  if (st.q.size() != s.n())
    throw ValidationError("initial queue vector must have length n");
  if ((st.q.array() < 0.0).any())
    throw ValidationError("initial queues must be nonnegative");
  if (policy == Policy::kProximal) {
    if (st.z.rows() != s.m() || st.z.cols() != s.n())
      throw ValidationError("initial setup queues must be m x n");
    if (st.nu.size() != s.n())
      throw ValidationError("initial multipliers must have length n");
    if ((st.z.array() < 0.0).any() || (st.nu.array() < 0.0).any())
      throw ValidationError("initial setup queues and multipliers must be "
                            "nonnegative");
  }
}

long step_count(const IntegrateOptions& opts) {
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt))
    throw ValidationError("dt must be positive");
  if (!(opts.T > 0.0) || !std::isfinite(opts.T))
    throw ValidationError("T must be positive");
  if (opts.stride < 1) throw ValidationError("stride must be at least 1");
  const long steps = std::lround(opts.T / opts.dt);
  if (steps < 1) throw ValidationError("T must be at least one step dt");
  return steps;
}

void check_myopic_dt(const ScenarioD& s, double dt) {
  const double limit = myopic_dt_limit(s);
  if (dt > limit) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the stability limit " << limit
       << " (eps * min c / (2 max r)); use dt <= " << limit;
    throw StabilityError(os.str(), limit);
  }
}

StepSignals myopic_signals(const SystemState& x, const ScenarioD& s) {
  StepSignals sig;
  const Eigen::VectorXd mu = waiting_time(x.q, s.c());
  sig.x = myopic_rates(mu, s);
  sig.setup_cost = setup_cost(sig.x, s);
  sig.lyapunov = dual_value(mu, s);
  return sig;
}

StepSignals proximal_signals(const SystemState& x, const ScenarioD& s,
                             const std::optional<Saddle>& ref) {
  StepSignals sig;
  sig.x = proximal_rates(x.z, x.nu, s);
  sig.setup_cost = setup_cost(sig.x, s);
  sig.lyapunov = ref ? lyapunov_distance(x.z, x.nu, ref->z, ref->nu)
                     : std::numeric_limits<double>::quiet_NaN();
  return sig;
}

class Recorder {
 public:
  Recorder(Trajectory& traj, long stride, long steps)
      : traj_(traj), stride_(stride), steps_(steps) {
    const auto n = static_cast<std::size_t>(steps / stride + 2);
    traj_.times.reserve(n);
    traj_.states.reserve(n);
    traj_.signals.reserve(n);
  }

  bool wants(long k) const { return k % stride_ == 0 || k == steps_; }

  void record(double t, const SystemState& x, StepSignals sig) {
    traj_.times.push_back(t);
    traj_.states.push_back(x);
    traj_.signals.push_back(std::move(sig));
  }

 private:
  Trajectory& traj_;
  long stride_;
  long steps_;
};

}  // namespace

Trajectory integrate(Policy policy, const SystemState& state0,
                     const ScenarioD& s, const IntegrateOptions& opts) {
  if (policy == Policy::kMyopicDelayed) {
    DelayedOptions d;
    d.integrate = opts;
    return integrate_delayed(state0, s, d);
  }
  check_state_shape(policy, state0, s);
  const long steps = step_count(opts);
  if (policy == Policy::kMyopic) check_myopic_dt(s, opts.dt);

  Trajectory traj;
  traj.meta = {policy, opts.dt, opts.stride, scenario_hash(s)};
  if (policy == Policy::kProximal) traj.reference = opts.reference;

  auto signals = [&](const SystemState& x) {
    return policy == Policy::kMyopic ? myopic_signals(x, s)
                                     : proximal_signals(x, s, opts.reference);
  };
  auto field = [&](const SystemState& x, double) {
    return policy == Policy::kMyopic ? myopic_derivative(x, s)
                                     : proximal_derivative(x, s);
  };

  Recorder rec(traj, opts.stride, steps);
  SystemState x = state0;
  rec.record(0.0, x, signals(x));
  for (long k = 1; k <= steps; ++k) {
    x = rk4_step(x, opts.dt, field);
    if (!all_finite(x))
      throw NumericalError("non-finite state at step " + std::to_string(k), k);
    if (rec.wants(k)) rec.record(static_cast<double>(k) * opts.dt, x, signals(x));
  }
  return traj;
}

DelayLine::DelayLine(const ScenarioD& s, double dt, const Eigen::MatrixXd& fill)
    : m_(s.m()), n_(s.n()) {
  if (fill.rows() != m_ || fill.cols() != n_)
    throw ValidationError("delay-line history must be m x n");
  lags_.reserve(static_cast<std::size_t>(m_ * n_));
  buffers_.reserve(static_cast<std::size_t>(m_ * n_));
  for (Eigen::Index i = 0; i < m_; ++i) {
    for (Eigen::Index j = 0; j < n_; ++j) {
      const double tau = s.tau()(i, j);
      const long lag = std::max(1L, std::lround(tau / dt));
      if (std::abs(static_cast<double>(lag) * dt - tau) > 0.01 * tau) {
        std::ostringstream os;
        os << "dt = " << dt << " does not divide tau[" << i + 1 << "]["
           << j + 1 << "] = " << tau << " within 1%";
        throw ValidationError(os.str());
      }
      lags_.push_back(lag);
      buffers_.emplace_back(static_cast<std::size_t>(lag + 1), fill(i, j));
    }
  }
}

long DelayLine::lag(Eigen::Index i, Eigen::Index j) const {
  return lags_[static_cast<std::size_t>(i * n_ + j)];
}

double DelayLine::delayed(Eigen::Index i, Eigen::Index j, double theta) const {
  const std::deque<double>& b = buffers_[static_cast<std::size_t>(i * n_ + j)];
  return (1.0 - theta) * b[0] + theta * b[1];
}

void DelayLine::push(const Eigen::MatrixXd& x) {
  for (Eigen::Index i = 0; i < m_; ++i) {
    for (Eigen::Index j = 0; j < n_; ++j) {
      std::deque<double>& b = buffers_[static_cast<std::size_t>(i * n_ + j)];
      b.pop_front();
      b.push_back(x(i, j));
    }
  }
}

Trajectory integrate_delayed(const SystemState& state0, const ScenarioD& s,
                             const DelayedOptions& opts) {
  const IntegrateOptions& io = opts.integrate;
  check_state_shape(Policy::kMyopicDelayed, state0, s);
  const long steps = step_count(io);
  check_myopic_dt(s, io.dt);

  Eigen::MatrixXd fill = Eigen::MatrixXd::Zero(s.m(), s.n());
  if (opts.history == DelayHistory::kRates) fill = opts.history_rates;
  DelayLine line(s, io.dt, fill);

  Trajectory traj;
  traj.meta = {Policy::kMyopicDelayed, io.dt, io.stride, scenario_hash(s)};

  auto field = [&](const SystemState& x, double theta) {
    Eigen::VectorXd inflow = Eigen::VectorXd::Zero(s.n());
    for (Eigen::Index i = 0; i < s.m(); ++i)
      for (Eigen::Index j = 0; j < s.n(); ++j)
        inflow(j) += line.delayed(i, j, theta);
    return Derivative{inflow - x.q.cwiseMin(s.c()), {}, {}};
  };

  Recorder rec(traj, io.stride, steps);
  SystemState x = state0;
  StepSignals sig = myopic_signals(x, s);
  for (long k = 0; k < steps; ++k) {
    line.push(sig.x);
    if (rec.wants(k)) rec.record(static_cast<double>(k) * io.dt, x, sig);
    x = rk4_step(x, io.dt, field);
    if (!all_finite(x))
      throw NumericalError("non-finite state at step " + std::to_string(k + 1),
                           k + 1);
    sig = myopic_signals(x, s);
  }
  rec.record(static_cast<double>(steps) * io.dt, x, sig);
  return traj;
}

double field_norm_at(const Trajectory& traj, const ScenarioD& s,
                     std::size_t k) {
  const SystemState& x = traj.states.at(k);
  switch (traj.meta.policy) {
    case Policy::kMyopic:
      return myopic_field(x.q, s).norm();
    case Policy::kProximal: {
      const CombinedField<double> f = combined_field(x.q, x.z, x.nu, s);
      return std::sqrt(f.dq.squaredNorm() + f.dz.squaredNorm() +
                       f.dnu.squaredNorm());
    }
    case Policy::kMyopicDelayed: {
      if (traj.size() < 2) return std::numeric_limits<double>::infinity();
      const std::size_t a = k == 0 ? 0 : k - 1;
      const std::size_t b = k == 0 ? 1 : k;
      return (traj.states[b].q - traj.states[a].q).norm() /
             (traj.times[b] - traj.times[a]);
    }
  }
  return std::numeric_limits<double>::infinity();
}

std::optional<SystemState> detect_equilibrium(const Trajectory& traj,
                                              const ScenarioD& s, double tol,
                                              double window) {
  if (traj.empty()) throw ValidationError("empty trajectory");
  const double t_end = traj.times.back();
  if (t_end - traj.times.front() < window) return std::nullopt;
  for (std::size_t k = traj.size(); k-- > 0;) {
    if (traj.times[k] < t_end - window) break;
    if (!(field_norm_at(traj, s, k) < tol)) return std::nullopt;
  }
  return traj.states.back();
}

MonotonicityReport monitor_lyapunov(const Trajectory& traj, const ScenarioD& s,
                                    LyapunovKind kind,
                                    std::optional<Saddle> reference,
                                    double slack) {
  MonotonicityReport rep;
  rep.kind = kind;
  rep.slack = slack;
  if (kind == LyapunovKind::kDualOfMu) {
    if (traj.meta.policy != Policy::kMyopic)
      throw ValidationError("dual-of-mu monitor applies to myopic runs only");
    rep.values.reserve(traj.size());
    for (const SystemState& x : traj.states)
      rep.values.push_back(dual_value(waiting_time(x.q, s.c()), s));
  } else {
    if (traj.meta.policy != Policy::kProximal)
      throw ValidationError(
          "saddle-distance monitor applies to proximal runs only");
    if (!reference) reference = traj.reference;
    if (!reference) reference = find_reference_saddle(s, s.ctilde());
    rep.values.reserve(traj.size());
    for (const SystemState& x : traj.states)
      rep.values.push_back(
          lyapunov_distance(x.z, x.nu, reference->z, reference->nu));
  }

  for (std::size_t k = 1; k < rep.values.size(); ++k) {
    const double delta = rep.values[k] - rep.values[k - 1];
    rep.deltas.push_back(delta);
    const double wrong_way =
        kind == LyapunovKind::kDualOfMu ? -delta : delta;
    if (wrong_way > slack) ++rep.violations;
    rep.worst_violation = std::max(rep.worst_violation, wrong_way);
  }
  return rep;
}

Saddle find_reference_saddle(const ScenarioD& s,
                             const Eigen::VectorXd& capacities,
                             const SaddleSearchOptions& opts) {
  if (!(s.r().sum() < capacities.sum()))
    throw InfeasibleError(
        "saddle search needs sum(r) strictly below the capacities");
  SystemState x;
  x.q = Eigen::VectorXd::Zero(0);
  x.z = Eigen::MatrixXd::Zero(s.m(), s.n());
  x.nu = Eigen::VectorXd::Zero(s.n());
  auto field = [&](const SystemState& st, double) {
    SaddleField<double> f = saddle_field(st.z, st.nu, s, capacities);
    return Derivative{Eigen::VectorXd::Zero(0), std::move(f.dz),
                      std::move(f.dnu)};
  };
  double residual = std::numeric_limits<double>::infinity();
  const long steps = std::lround(opts.t_max / opts.dt);
  for (long k = 0; k <= steps; ++k) {
    const SaddleField<double> f = saddle_field(x.z, x.nu, s, capacities);
    residual = std::sqrt(f.dz.squaredNorm() + f.dnu.squaredNorm());
    if (residual < opts.tol) return {x.z, x.nu};
    x = rk4_step(x, opts.dt, field);
  }
  Eigen::VectorXd last(x.z.size() + x.nu.size());
  last << Eigen::Map<const Eigen::VectorXd>(x.z.data(), x.z.size()), x.nu;
  throw SolverError("saddle dynamics did not settle within t_max", last,
                    residual);
}

ProximalEquilibrium settle_proximal(const ScenarioD& s,
                                    const Eigen::VectorXd& capacities,
                                    const SettleOptions& opts) {
  if (capacities.size() != s.n())
    throw ValidationError("capacity vector must have length n");
  if (!(s.r().sum() <= capacities.sum()))
    throw InfeasibleError("scenario is infeasible for the given capacities");

  auto field = [&](const SystemState& st, double) {
    SaddleField<double> f = saddle_field(st.z, st.nu, s, capacities);
    Eigen::VectorXd dq = s.gamma().cwiseProduct(st.z).colwise().sum().transpose() -
                         st.q.cwiseMin(s.c());
    return Derivative{std::move(dq), std::move(f.dz), std::move(f.dnu)};
  };
  auto norm = [](const Derivative& d) {
    return std::sqrt(d.q.squaredNorm() + d.z.squaredNorm() +
                     d.nu.squaredNorm());
  };

  SystemState x = zero_state(Policy::kProximal, s);
  const long steps = std::lround(opts.t_max / opts.dt);
  double residual = std::numeric_limits<double>::infinity();
  for (long k = 0; k <= steps; ++k) {
    residual = norm(field(x, 0.0));
    if (residual < opts.tol) {
      ProximalEquilibrium eq;
      eq.q = x.q;
      eq.z = x.z;
      eq.nu = x.nu;
      eq.x = proximal_rates(x.z, x.nu, s);
      eq.capacities = capacities;
      eq.time = static_cast<double>(k) * opts.dt;
      eq.field_norm = residual;
      eq.kkt = verify_proximal_kkt(x.z, x.nu, s, capacities);
      eq.costs = compute_costs(eq.x, s);
      return eq;
    }
    x = rk4_step(x, opts.dt, field);
    if (!all_finite(x))
      throw NumericalError("non-finite state at step " + std::to_string(k + 1),
                           k + 1);
  }
  Eigen::VectorXd last(x.q.size() + x.z.size() + x.nu.size());
  last << x.q, Eigen::Map<const Eigen::VectorXd>(x.z.data(), x.z.size()), x.nu;
  throw SolverError("proximal dynamics did not settle within t_max", last,
                    residual);
}

}  // namespace fluidlb
