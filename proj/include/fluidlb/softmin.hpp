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

// Log-sum-exp soft-min
//
//   phi_eps(y) = -eps * log(sum_j exp(-y_j / eps))
//
// and its gradient, the softmax of -y / eps. Both shift by min(y) before
// exponentiating, so the largest exponent is exactly zero and the sum lies
// in [1, n].

#ifndef FLUIDLB_SOFTMIN_HPP
#define FLUIDLB_SOFTMIN_HPP

#include "fluidlb/types.hpp"

#include <cmath>

namespace fluidlb {

namespace detail {

template <typename Derived>
void check_softmin_args(const Eigen::MatrixBase<Derived>& y,
                        typename Derived::Scalar eps) {
  if (y.size() == 0) throw ValidationError("soft-min of an empty vector");
  if (!(eps > typename Derived::Scalar(0)))
    throw ValidationError("soft-min smoothing must be positive");
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar softmin_value(const Eigen::MatrixBase<Derived>& y,
                                       typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  using std::log;
  detail::check_softmin_args(y, eps);
  const Scalar lo = y.minCoeff();
  const Scalar sum = (-(y.array() - lo) / eps).exp().sum();
  return lo - eps * log(sum);
}

template <typename Derived>
SimplexVector<typename Derived::Scalar> softmin_gradient(
    const Eigen::MatrixBase<Derived>& y, typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  detail::check_softmin_args(y, eps);
  const Scalar lo = y.minCoeff();
  Vector<Scalar> w = (-(y.array() - lo) / eps).exp().matrix();
  return w / w.sum();
}

}  // namespace fluidlb

#endif  // FLUIDLB_SOFTMIN_HPP
