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

// Independent reference computations used by the verification suite and the
// tests. Nothing here shares a code path with the routines it checks:
// soft-min without the min shift, central finite differences, and a plain
// projected-gradient solver for the dispatcher QP whose simplex projection
// is found by bisection instead of breakpoint sorting.

#ifndef FLUIDLB_ORACLES_HPP
#define FLUIDLB_ORACLES_HPP

#include "fluidlb/types.hpp"

#include <cmath>

namespace fluidlb::oracle {

// -eps log sum exp(-y / eps), evaluated literally.
template <typename Scalar>
Scalar direct_softmin(const Vector<Scalar>& y, Scalar eps) {
  using std::exp;
  using std::log;
  Scalar sum(0);
  for (Eigen::Index j = 0; j < y.size(); ++j) sum += exp(-y(j) / eps);
  return -eps * log(sum);
}

template <typename Scalar>
Vector<Scalar> direct_softmax(const Vector<Scalar>& y, Scalar eps) {
  using std::exp;
  Vector<Scalar> w(y.size());
  for (Eigen::Index j = 0; j < y.size(); ++j) w(j) = exp(-y(j) / eps);
  return w / w.sum();
}

// Central differences of a scalar function of a dense argument (vector or
// matrix), one coordinate at a time.
template <typename Arg, typename F>
Arg central_difference(F&& f, const Arg& x, typename Arg::Scalar h) {
  using Scalar = typename Arg::Scalar;
  Arg grad(x.rows(), x.cols());
  Arg probe = x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const Scalar saved = probe(k);
    probe(k) = saved + h;
    const Scalar up = f(probe);
    probe(k) = saved - h;
    const Scalar down = f(probe);
    probe(k) = saved;
    grad(k) = (up - down) / (Scalar(2) * h);
  }
  return grad;
}

// Euclidean projection onto {x >= 0, sum x = rate}: x = [v - shift]^+ with
// the shift located by bisection.
template <typename Scalar>
Vector<Scalar> project_scaled_simplex(const Vector<Scalar>& v, Scalar rate) {
  Scalar lo = v.minCoeff() - rate;  // sum at lo >= rate
  Scalar hi = v.maxCoeff();         // sum at hi == 0
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (mid == lo || mid == hi) break;
    const Scalar sum = (v.array() - mid).max(Scalar(0)).sum();
    (sum > rate ? lo : hi) = mid;
  }
  Vector<Scalar> x = (v.array() - Scalar(0.5) * (lo + hi)).max(Scalar(0));
  const Scalar total = x.sum();
  if (total > Scalar(0)) x *= rate / total;
  return x;
}

// Projected gradient on the dispatcher QP
//   min sum_j (1/g_j + nu_j) x_j + (x_j - g_j z_j)^2 / (2 g_j)
// with step 1 / max_j (1 / g_j), run until the iterate stops moving.
template <typename Scalar>
Vector<Scalar> brute_force_dispatcher_qp(const Vector<Scalar>& gamma,
                                         const Vector<Scalar>& z,
                                         const Vector<Scalar>& nu, Scalar rate,
                                         Scalar tol = Scalar(1e-13),
                                         long max_iters = 2'000'000) {
  const Vector<Scalar> tau = gamma.cwiseInverse();
  const Scalar step = Scalar(1) / tau.maxCoeff();
  Vector<Scalar> x = Vector<Scalar>::Constant(gamma.size(),
                                              rate / Scalar(gamma.size()));
  for (long it = 0; it < max_iters; ++it) {
    const Vector<Scalar> grad =
        tau + nu + tau.cwiseProduct(x - gamma.cwiseProduct(z));
    const Vector<Scalar> next = project_scaled_simplex<Scalar>(x - step * grad,
                                                               rate);
    const Scalar moved = (next - x).cwiseAbs().maxCoeff();
    x = next;
    if (moved < tol) break;
  }
  return x;
}

}  // namespace fluidlb::oracle

#endif  // FLUIDLB_ORACLES_HPP
