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

// Myopic delay-to-service routing. Each dispatcher splits its arrivals by
// the soft-min fractions of tau_i + mu, where mu_j is the waiting time at
// pool j implied by its queue.

#ifndef FLUIDLB_MYOPIC_HPP
#define FLUIDLB_MYOPIC_HPP

#include "fluidlb/model.hpp"
#include "fluidlb/softmin.hpp"

#include <vector>

namespace fluidlb {

// mu_j = [q_j / c_j - 1]^+
template <typename Scalar>
DelayVector<Scalar> waiting_time(const Vector<Scalar>& q,
                                 const Vector<Scalar>& c) {
  if (q.size() != c.size())
    throw ValidationError("queue and capacity vectors differ in length");
  if ((q.array() < Scalar(0)).any())
    throw ValidationError("queue lengths must be nonnegative");
  return (q.array() / c.array() - Scalar(1)).max(Scalar(0)).matrix();
}

// Row i is r_i times the soft-min fractions of the delays tau_i + mu.
template <typename Scalar>
RoutingMatrix<Scalar> myopic_rates(const DelayVector<Scalar>& mu,
                                   const Scenario<Scalar>& s) {
  if (mu.size() != s.n())
    throw ValidationError("delay vector must have length n");
  RoutingMatrix<Scalar> x(s.m(), s.n());
  for (Eigen::Index i = 0; i < s.m(); ++i) {
    const Vector<Scalar> delays = s.tau().row(i).transpose() + mu;
    x.row(i) = s.r()(i) * softmin_gradient(delays, s.epsilon()).transpose();
  }
  return x;
}

// dq_j/dt = sum_i x_ij(mu(q)) - min(q_j, c_j)
template <typename Scalar>
Vector<Scalar> myopic_field(const Vector<Scalar>& q,
                            const Scenario<Scalar>& s) {
  const RoutingMatrix<Scalar> x = myopic_rates(waiting_time(q, s.c()), s);
  return x.colwise().sum().transpose() - q.cwiseMin(s.c());
}

// Jacobian of myopic_field in q. Pools at q_j > c_j feed back through
// mu_j' = 1 / c_j and drain at the constant rate c_j; pools at or below
// capacity drain at rate q_j and have mu_j' = 0 (one-sided at the kink).
template <typename Scalar>
Matrix<Scalar> myopic_jacobian(const Vector<Scalar>& q,
                               const Scenario<Scalar>& s) {
  const DelayVector<Scalar> mu = waiting_time(q, s.c());
  const Eigen::Index n = s.n();
  Matrix<Scalar> rate_sens = Matrix<Scalar>::Zero(n, n);  // d colsum / d mu
  for (Eigen::Index i = 0; i < s.m(); ++i) {
    const Vector<Scalar> delays = s.tau().row(i).transpose() + mu;
    const Vector<Scalar> d = softmin_gradient(delays, s.epsilon());
    Matrix<Scalar> h = d * d.transpose();
    h.diagonal() -= d;
    rate_sens += (s.r()(i) / s.epsilon()) * h;
  }
  Matrix<Scalar> jac(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const bool saturated = q(k) > s.c()(k);
    jac.col(k) = saturated ? Vector<Scalar>(rate_sens.col(k) / s.c()(k))
                           : Vector<Scalar>::Zero(n);
    if (!saturated) jac(k, k) -= Scalar(1);
  }
  return jac;
}

// Newton refinement of a myopic fixed point, starting near one. Returns the
// iterate with the smallest field norm, so the result is never worse than
// the start. Used to place warm starts on the equilibrium to working
// precision.
template <typename Scalar>
Vector<Scalar> polish_myopic_fixed_point(Vector<Scalar> q,
                                         const Scenario<Scalar>& s,
                                         int max_iters = 20) {
  Vector<Scalar> best = q;
  Scalar best_norm = myopic_field(q, s).norm();
  for (int it = 0; it < max_iters && best_norm > Scalar(0); ++it) {
    const Vector<Scalar> f = myopic_field(q, s);
    const Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(myopic_jacobian(q, s));
    if (!qr.isInvertible()) break;
    q = (q - qr.solve(f)).cwiseMax(Scalar(0));
    const Scalar norm = myopic_field(q, s).norm();
    if (norm < best_norm) {
      best = q;
      best_norm = norm;
    }
  }
  return best;
}

// Hard-min rule: the pool with the smallest tau_ij + mu_j for each type,
// ties to the lowest index. Diagnostic only; the dynamics use the soft-min.
template <typename Scalar>
std::vector<Eigen::Index> hard_myopic_choice(const DelayVector<Scalar>& mu,
                                             const Scenario<Scalar>& s) {
  if (mu.size() != s.n())
    throw ValidationError("delay vector must have length n");
  std::vector<Eigen::Index> choice(static_cast<std::size_t>(s.m()));
  for (Eigen::Index i = 0; i < s.m(); ++i) {
    Eigen::Index best = 0;
    Scalar best_delay = s.tau()(i, 0) + mu(0);
    for (Eigen::Index j = 1; j < s.n(); ++j) {
      const Scalar d = s.tau()(i, j) + mu(j);
      if (d < best_delay) {
        best_delay = d;
        best = j;
      }
    }
    choice[static_cast<std::size_t>(i)] = best;
  }
  return choice;
}

}  // namespace fluidlb

#endif  // FLUIDLB_MYOPIC_HPP
