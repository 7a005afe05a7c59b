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

// Proximal routing with virtual-queue multipliers.
//
// The routing problem carries a weighted proximal term tying the rates X to
// the setup queues Z:
//
//   min_{X,Z} sum_ij [ x_ij / g_ij + (x_ij - g_ij z_ij)^2 / (2 g_ij) ]
//   s.t.      x >= 0,  sum_j x_ij = r_i,  sum_i x_ij <= cap_j,
//
// with g = gamma = 1 / tau. Dualizing the capacity rows with nu >= 0 and
// minimizing over X leaves the reduced Lagrangian Lbar(Z, nu), convex in Z
// and concave in nu, whose minimizer Xbar(Z, nu) decouples into one small
// simplex-constrained QP per dispatcher.

#ifndef FLUIDLB_PROXIMAL_HPP
#define FLUIDLB_PROXIMAL_HPP

#include "fluidlb/model.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace fluidlb {

template <typename Scalar>
struct DispatcherSolution {
  Vector<Scalar> x;
  // Water level: x_j = g_j [b_j - level]^+ with b_j = z_j - nu_j - 1 / g_j.
  Scalar level{};
};

// Minimizes sum_j (1/g_j + nu_j) x_j + (x_j - g_j z_j)^2 / (2 g_j) over
// {x >= 0, sum x = rate}. Stationarity gives x_j = g_j [b_j - level]^+ and
// sum_j x_j(level) is continuous, piecewise linear and strictly decreasing
// while positive, so the level is found exactly by walking the sorted
// breakpoints b_j.
template <typename Scalar>
DispatcherSolution<Scalar> solve_dispatcher_qp(const Vector<Scalar>& gamma,
                                               const Vector<Scalar>& z,
                                               const Vector<Scalar>& nu,
                                               Scalar rate) {
  const Eigen::Index n = gamma.size();
  if (z.size() != n || nu.size() != n)
    throw ValidationError("dispatcher QP inputs differ in length");
  if (!(rate > Scalar(0)))
    throw ValidationError("dispatcher arrival rate must be positive");

  const Vector<Scalar> b = z - nu - gamma.cwiseInverse();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index c) { return b(a) > b(c); });

  // With the k largest breakpoints active: sum_k g (b - level) = rate.
  Scalar gamma_sum(0);
  Scalar weighted_sum(0);
  Scalar level(0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Eigen::Index j = order[k];
    gamma_sum += gamma(j);
    weighted_sum += gamma(j) * b(j);
    level = (weighted_sum - rate) / gamma_sum;
    if (k + 1 == order.size() || level >= b(order[k + 1])) break;
  }

  DispatcherSolution<Scalar> sol;
  sol.level = level;
  sol.x = gamma.cwiseProduct((b.array() - level).max(Scalar(0)).matrix());
  const Scalar total = sol.x.sum();
  if (total > Scalar(0)) sol.x *= rate / total;
  return sol;
}

// Row i of Xbar(Z, nu).
template <typename Scalar>
Vector<Scalar> dispatcher_qp(Eigen::Index i, const Vector<Scalar>& z_row,
                             const Vector<Scalar>& nu,
                             const Scenario<Scalar>& s) {
  return solve_dispatcher_qp<Scalar>(s.gamma().row(i).transpose(), z_row, nu,
                                     s.r()(i))
      .x;
}

template <typename Scalar>
RoutingMatrix<Scalar> proximal_rates(const Matrix<Scalar>& z,
                                     const Vector<Scalar>& nu,
                                     const Scenario<Scalar>& s) {
  if (z.rows() != s.m() || z.cols() != s.n())
    throw ValidationError("setup-queue matrix must be m x n");
  RoutingMatrix<Scalar> x(s.m(), s.n());
  for (Eigen::Index i = 0; i < s.m(); ++i)
    x.row(i) = dispatcher_qp<Scalar>(i, z.row(i).transpose(), nu, s)
                   .transpose();
  return x;
}

// Lbar(Z, nu) = L(Xbar(Z, nu), Z, nu), including -sum_j nu_j cap_j.
template <typename Scalar>
Scalar reduced_lagrangian(const Matrix<Scalar>& z, const Vector<Scalar>& nu,
                          const Scenario<Scalar>& s,
                          const Vector<Scalar>& capacities) {
  const RoutingMatrix<Scalar> x = proximal_rates(z, nu, s);
  const Matrix<Scalar> gap = x - s.gamma().cwiseProduct(z);
  const Scalar cost =
      s.tau().cwiseProduct(x).sum() +
      (gap.array().square() * s.tau().array()).sum() / Scalar(2);
  const Vector<Scalar> cols = x.colwise().sum().transpose();
  return cost + nu.dot(cols - capacities);
}

template <typename Scalar>
struct ReducedGradients {
  Matrix<Scalar> dz;   // g_ij z_ij - xbar_ij
  Vector<Scalar> dnu;  // sum_i xbar_ij - cap_j
};

// Envelope gradients of Lbar; no differentiation through the argmin.
template <typename Scalar>
ReducedGradients<Scalar> reduced_gradients(const Matrix<Scalar>& z,
                                           const Vector<Scalar>& nu,
                                           const Scenario<Scalar>& s,
                                           const Vector<Scalar>& capacities) {
  const RoutingMatrix<Scalar> x = proximal_rates(z, nu, s);
  return {s.gamma().cwiseProduct(z) - x,
          x.colwise().sum().transpose() - capacities};
}

// [alpha]^+_beta: alpha if alpha > 0 or beta > 0, else 0.
template <typename Scalar>
Scalar positive_projection(Scalar alpha, Scalar beta) {
  return (alpha > Scalar(0) || beta > Scalar(0)) ? alpha : Scalar(0);
}

template <typename Scalar>
struct SaddleField {
  Matrix<Scalar> dz;
  Vector<Scalar> dnu;
  RoutingMatrix<Scalar> x;  // Xbar at the evaluation point
};

// Primal descent in Z, projected dual ascent in nu.
template <typename Scalar>
SaddleField<Scalar> saddle_field(const Matrix<Scalar>& z,
                                 const Vector<Scalar>& nu,
                                 const Scenario<Scalar>& s,
                                 const Vector<Scalar>& capacities) {
  SaddleField<Scalar> f;
  f.x = proximal_rates(z, nu, s);
  f.dz = f.x - s.gamma().cwiseProduct(z);
  const Vector<Scalar> excess = f.x.colwise().sum().transpose() - capacities;
  f.dnu.resize(s.n());
  for (Eigen::Index j = 0; j < s.n(); ++j)
    f.dnu(j) = positive_projection(excess(j), nu(j));
  return f;
}

template <typename Scalar>
struct CombinedField {
  Vector<Scalar> dq;
  Matrix<Scalar> dz;
  Vector<Scalar> dnu;
  RoutingMatrix<Scalar> x;
};

// Pool queues fed by setup completions, g_ij z_ij, and drained at
// min(q_j, c_j); (Z, nu) follow the saddle dynamics against ctilde and do not
// depend on q.
template <typename Scalar>
CombinedField<Scalar> combined_field(const Vector<Scalar>& q,
                                     const Matrix<Scalar>& z,
                                     const Vector<Scalar>& nu,
                                     const Scenario<Scalar>& s) {
  SaddleField<Scalar> sf = saddle_field(z, nu, s, s.ctilde());
  CombinedField<Scalar> f;
  f.dq = s.gamma().cwiseProduct(z).colwise().sum().transpose() -
         q.cwiseMin(s.c());
  f.dz = std::move(sf.dz);
  f.dnu = std::move(sf.dnu);
  f.x = std::move(sf.x);
  return f;
}

// V = 1/2 |Z - Zhat|^2 + 1/2 |nu - nuhat|^2
template <typename Scalar>
Scalar lyapunov_distance(const Matrix<Scalar>& z, const Vector<Scalar>& nu,
                         const Matrix<Scalar>& z_hat,
                         const Vector<Scalar>& nu_hat) {
  return Scalar(0.5) * (z - z_hat).squaredNorm() +
         Scalar(0.5) * (nu - nu_hat).squaredNorm();
}

template <typename Scalar>
struct ProximalKkt {
  Scalar primal_infeas{};
  Scalar dual_infeas{};
  Scalar comp_slack{};
  // Largest of |Xbar - g Z| and the reduced-cost violation
  // x_ij (tau_ij + nu_j - min_k (tau_ik + nu_k)).
  Scalar stationarity{};

  Scalar max() const {
    return std::max({primal_infeas, dual_infeas, comp_slack, stationarity});
  }
};

// Optimality of (Xbar(Z, nu), Z, nu) for the proximal problem with the given
// capacities: at a saddle the proximal term vanishes and (X, nu) is a primal
// dual pair of the setup-cost LP.
template <typename Scalar>
ProximalKkt<Scalar> verify_proximal_kkt(const Matrix<Scalar>& z,
                                        const Vector<Scalar>& nu,
                                        const Scenario<Scalar>& s,
                                        const Vector<Scalar>& capacities) {
  const RoutingMatrix<Scalar> x = proximal_rates(z, nu, s);
  ProximalKkt<Scalar> res;
  const Vector<Scalar> rows = x.rowwise().sum();
  const Vector<Scalar> cols = x.colwise().sum().transpose();
  res.primal_infeas = std::max(
      {(rows - s.r()).cwiseAbs().maxCoeff(),
       (cols - capacities).cwiseMax(Scalar(0)).maxCoeff(),
       (-x).cwiseMax(Scalar(0)).maxCoeff()});
  res.dual_infeas = (-nu).cwiseMax(Scalar(0)).maxCoeff();
  res.comp_slack = nu.cwiseProduct(capacities - cols).cwiseAbs().maxCoeff();

  Scalar reduced_cost(0);
  for (Eigen::Index i = 0; i < s.m(); ++i) {
    const Vector<Scalar> price = s.tau().row(i).transpose() + nu;
    const Scalar best = price.minCoeff();
    for (Eigen::Index j = 0; j < s.n(); ++j)
      reduced_cost = std::max(reduced_cost, x(i, j) * (price(j) - best));
  }
  res.stationarity = std::max(
      (x - s.gamma().cwiseProduct(z)).cwiseAbs().maxCoeff(), reduced_cost);
  return res;
}

}  // namespace fluidlb

#endif  // FLUIDLB_PROXIMAL_HPP
