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

// Equilibrium of the myopic dynamics via the dual of the entropy-regularized
// routing problem
//
//   min  sum_ij tau_ij x_ij + eps sum_ij x_ij log(x_ij / r_i)
//   s.t. x >= 0,  sum_j x_ij = r_i,  sum_i x_ij <= c_j.
//
// Minimizing the Lagrangian over each row gives the soft-min, so the dual is
//
//   D(mu) = sum_i r_i phi_eps(tau_i + mu) - sum_j c_j mu_j,
//
// which is concave and smooth. Its maximizer over mu >= 0 gives the waiting
// times at equilibrium, the primal rates follow from the soft-min fractions
// and the pool queues from q_j = sum_i x_ij + c_j mu_j.

#ifndef FLUIDLB_EQUILIBRIUM_HPP
#define FLUIDLB_EQUILIBRIUM_HPP

#include "fluidlb/model.hpp"
#include "fluidlb/myopic.hpp"
#include "fluidlb/softmin.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace fluidlb {

template <typename Scalar>
Scalar dual_value(const Vector<Scalar>& mu, const Scenario<Scalar>& s) {
  Scalar value = -s.c().dot(mu);
  for (Eigen::Index i = 0; i < s.m(); ++i) {
    const Vector<Scalar> delays = s.tau().row(i).transpose() + mu;
    value += s.r()(i) * softmin_value(delays, s.epsilon());
  }
  return value;
}

// dD/dmu_j = sum_i r_i delta_ij(mu) - c_j
template <typename Scalar>
Vector<Scalar> dual_gradient(const Vector<Scalar>& mu,
                             const Scenario<Scalar>& s) {
  return myopic_rates(mu, s).colwise().sum().transpose() - s.c();
}

// Gradient with the components that would push a zero multiplier negative
// removed; vanishes exactly at the maximizer of D over mu >= 0.
template <typename Scalar>
Vector<Scalar> projected_dual_gradient(const Vector<Scalar>& mu,
                                       const Vector<Scalar>& grad) {
  Vector<Scalar> pg = grad;
  for (Eigen::Index j = 0; j < mu.size(); ++j)
    if (!(mu(j) > Scalar(0))) pg(j) = std::max(grad(j), Scalar(0));
  return pg;
}

struct DualSolverOptions {
  double step = 0.0;  // initial step; 0 selects eps * min(c) / max(r)
  double tol = 1e-8;  // on the projected-gradient norm
  long max_iters = 1'000'000;
  std::optional<Eigen::VectorXd> mu0;
};

template <typename Scalar>
struct DualSolution {
  Vector<Scalar> mu;
  long iterations = 0;
  Scalar residual{};
};

// Projected gradient ascent on D over mu >= 0 with backtracking. A step is
// accepted when it achieves half the first-order increase. Near the optimum
// the increase drowns in rounding, so a step is then also accepted when the
// local gradient change certifies it is below 1 / L.
template <typename Scalar>
DualSolution<Scalar> solve_dual(const Scenario<Scalar>& s,
                                const DualSolverOptions& opts = {}) {
  using std::abs;
  if (!check_feasibility(s).feasible)
    throw InfeasibleError("scenario is infeasible: sum(r) > sum(c)");

  Scalar alpha = opts.step > 0.0
                     ? Scalar(opts.step)
                     : s.epsilon() * s.c().minCoeff() / s.r().maxCoeff();
  Vector<Scalar> mu = Vector<Scalar>::Zero(s.n());
  if (opts.mu0) {
    if (opts.mu0->size() != s.n())
      throw ValidationError("initial multipliers must have length n");
    mu = opts.mu0->template cast<Scalar>().cwiseMax(Scalar(0));
  }

  Scalar value = dual_value(mu, s);
  Vector<Scalar> grad = dual_gradient(mu, s);
  Scalar residual = projected_dual_gradient(mu, grad).norm();

  for (long it = 0; it < opts.max_iters; ++it) {
    if (residual < Scalar(opts.tol)) return {mu, it, residual};

    bool accepted = false;
    for (int tries = 0; tries < 200 && !accepted; ++tries) {
      const Vector<Scalar> trial = (mu + alpha * grad).cwiseMax(Scalar(0));
      const Vector<Scalar> step = trial - mu;
      const Scalar step_norm = step.norm();
      if (step_norm == Scalar(0)) break;
      const Scalar trial_value = dual_value(trial, s);
      const Vector<Scalar> trial_grad = dual_gradient(trial, s);

      const bool ascent =
          trial_value >= value + Scalar(0.5) * grad.dot(step);
      const bool in_noise = abs(trial_value - value) <=
                            Scalar(64) * Eigen::NumTraits<Scalar>::epsilon() *
                                (Scalar(1) + abs(value));
      const bool short_step = alpha * (trial_grad - grad).norm() <= step_norm;
      if (ascent || (in_noise && short_step)) {
        mu = trial;
        value = trial_value;
        grad = trial_grad;
        accepted = true;
        if (tries == 0) alpha *= Scalar(2);
      } else {
        alpha *= Scalar(0.5);
      }
    }
    residual = projected_dual_gradient(mu, grad).norm();
    if (!accepted && residual >= Scalar(opts.tol))
      throw SolverError("dual ascent stalled: no acceptable step",
                        mu.template cast<double>(), double(residual));
  }
  if (residual < Scalar(opts.tol)) return {mu, opts.max_iters, residual};
  throw SolverError("dual ascent exceeded the iteration limit",
                    mu.template cast<double>(), double(residual));
}

// x*_ij = r_i delta_ij(mu*)
template <typename Scalar>
RoutingMatrix<Scalar> primal_from_dual(const Vector<Scalar>& mu_star,
                                       const Scenario<Scalar>& s) {
  return myopic_rates(mu_star, s);
}

template <typename Scalar>
struct EquilibriumQueues {
  Vector<Scalar> q;
  // saturated[j]: mu*_j > 0, so q*_j = c_j (1 + mu*_j); otherwise
  // q*_j is the column sum of x*.
  std::vector<bool> saturated;
};

template <typename Scalar>
EquilibriumQueues<Scalar> equilibrium_queues(const RoutingMatrix<Scalar>& x,
                                             const Vector<Scalar>& mu,
                                             const Scenario<Scalar>& s) {
  EquilibriumQueues<Scalar> eq;
  eq.q = x.colwise().sum().transpose() + s.c().cwiseProduct(mu);
  eq.saturated.resize(static_cast<std::size_t>(s.n()));
  for (Eigen::Index j = 0; j < s.n(); ++j)
    eq.saturated[static_cast<std::size_t>(j)] = mu(j) > Scalar(0);
  return eq;
}

template <typename Scalar>
struct KktResiduals {
  Scalar primal_infeas{};  // row-sum mismatch, capacity excess, negativity
  Scalar dual_infeas{};    // negative multipliers
  Scalar comp_slack{};     // |mu_j (c_j - sum_i x_ij)|
  Scalar stationarity{};   // distance of x from r_i delta_i(mu)

  Scalar max() const {
    return std::max({primal_infeas, dual_infeas, comp_slack, stationarity});
  }
};

template <typename Scalar>
Scalar primal_infeasibility(const RoutingMatrix<Scalar>& x,
                            const Scenario<Scalar>& s,
                            const Vector<Scalar>& capacities) {
  const Vector<Scalar> rows = x.rowwise().sum();
  const Vector<Scalar> cols = x.colwise().sum().transpose();
  const Scalar row_gap = (rows - s.r()).cwiseAbs().maxCoeff();
  const Scalar cap_excess = (cols - capacities).cwiseMax(Scalar(0)).maxCoeff();
  const Scalar negative = (-x).cwiseMax(Scalar(0)).maxCoeff();
  return std::max({row_gap, cap_excess, negative});
}

// Saddle-point certificate for (x, mu) on the entropy-regularized problem.
template <typename Scalar>
KktResiduals<Scalar> verify_kkt(const RoutingMatrix<Scalar>& x,
                                const Vector<Scalar>& mu,
                                const Scenario<Scalar>& s) {
  KktResiduals<Scalar> res;
  res.primal_infeas = primal_infeasibility(x, s, s.c());
  res.dual_infeas = (-mu).cwiseMax(Scalar(0)).maxCoeff();
  const Vector<Scalar> cols = x.colwise().sum().transpose();
  res.comp_slack = mu.cwiseProduct(s.c() - cols).cwiseAbs().maxCoeff();
  res.stationarity =
      (x - myopic_rates<Scalar>(mu.cwiseMax(Scalar(0)), s)).cwiseAbs().maxCoeff();
  return res;
}

template <typename Scalar>
struct EquilibriumReport {
  Vector<Scalar> mu_star;
  RoutingMatrix<Scalar> x_star;
  Vector<Scalar> q_star;
  std::vector<bool> saturated;
  Scalar dual_value{};
  KktResiduals<Scalar> kkt;
  // Strict feasibility makes mu* unique. On the boundary sum(r) = sum(c)
  // any mu* + K 1 with K >= 0 is also optimal when all pools saturate.
  bool unique = false;
  CostReport<Scalar> costs;
  long iterations = 0;
};

template <typename Scalar>
EquilibriumReport<Scalar> solve_equilibrium(const Scenario<Scalar>& s,
                                            const DualSolverOptions& opts = {}) {
  const DualSolution<Scalar> sol = solve_dual(s, opts);
  EquilibriumReport<Scalar> rep;
  rep.mu_star = sol.mu;
  rep.iterations = sol.iterations;
  rep.x_star = primal_from_dual(sol.mu, s);
  const EquilibriumQueues<Scalar> eq = equilibrium_queues(rep.x_star, sol.mu, s);
  rep.q_star = eq.q;
  rep.saturated = eq.saturated;
  rep.dual_value = dual_value(sol.mu, s);
  rep.kkt = verify_kkt(rep.x_star, sol.mu, s);
  rep.unique = check_feasibility(s).strictly_feasible;
  rep.costs = compute_costs(rep.x_star, s);
  return rep;
}

inline const std::vector<double>& default_eps_sequence() {
  static const std::vector<double> seq{0.1, 0.03, 0.01, 0.003};
  return seq;
}

// Rates of the entropy-regularized problem along a decreasing smoothing
// sequence, warm-starting each solve from the previous multipliers. The last
// primal approximates the eps -> 0 (pure setup-cost) allocation.
template <typename Scalar>
RoutingMatrix<Scalar> reference_rates_small_eps(
    const Scenario<Scalar>& s,
    const std::vector<double>& eps_sequence = default_eps_sequence(),
    DualSolverOptions opts = {}) {
  if (eps_sequence.empty())
    throw ValidationError("smoothing sequence must not be empty");
  RoutingMatrix<Scalar> x;
  opts.step = 0.0;
  for (double eps : eps_sequence) {
    const Scenario<Scalar> se = s.with_epsilon(Scalar(eps));
    const DualSolution<Scalar> sol = solve_dual(se, opts);
    opts.mu0 = sol.mu.template cast<double>();
    x = primal_from_dual(sol.mu, se);
  }
  return x;
}

}  // namespace fluidlb

#endif  // FLUIDLB_EQUILIBRIUM_HPP
