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

// Problem instance, feasibility tests and cost functionals shared by every
// other module. The setup-time matrix tau is the stored source of truth;
// gamma = 1 / tau is derived once at construction.

#ifndef FLUIDLB_MODEL_HPP
#define FLUIDLB_MODEL_HPP

#include "fluidlb/types.hpp"

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

namespace fluidlb {

// Raw, unvalidated scenario fields as read from a file or built in code.
template <typename Scalar>
struct ScenarioFields {
  Vector<Scalar> r;
  Vector<Scalar> c;
  Matrix<Scalar> tau;
  std::optional<Scalar> epsilon;
  // Either an explicit shrunk capacity vector or a factor applied to c.
  std::optional<Vector<Scalar>> ctilde;
  std::optional<Scalar> ctilde_factor;
};

inline constexpr double kDefaultEpsilon = 0.01;
inline constexpr double kDefaultCtildeFactor = 0.99;

template <typename Scalar>
class Scenario;

template <typename Scalar>
Scenario<Scalar> validate_scenario(const ScenarioFields<Scalar>& raw);

// Immutable problem instance: m task types routed to n pools.
template <typename Scalar>
class Scenario {
 public:
  Eigen::Index m() const { return r_.size(); }
  Eigen::Index n() const { return c_.size(); }

  const Vector<Scalar>& r() const { return r_; }
  const Vector<Scalar>& c() const { return c_; }
  const Matrix<Scalar>& tau() const { return tau_; }
  const Matrix<Scalar>& gamma() const { return gamma_; }
  Scalar epsilon() const { return epsilon_; }
  const Vector<Scalar>& ctilde() const { return ctilde_; }

  ScenarioFields<Scalar> fields() const {
    ScenarioFields<Scalar> f;
    f.r = r_;
    f.c = c_;
    f.tau = tau_;
    f.epsilon = epsilon_;
    f.ctilde = ctilde_;
    return f;
  }

  // Same instance with pool capacities replaced; the shrink ratio
  // ctilde_j / c_j of every pool is kept.
  Scenario with_capacities(const Vector<Scalar>& capacities) const {
    ScenarioFields<Scalar> f = fields();
    if (capacities.size() != n())
      throw ValidationError("capacity vector must have length n");
    f.ctilde = ctilde_.cwiseQuotient(c_).cwiseProduct(capacities);
    f.c = capacities;
    return validate_scenario(f);
  }

  Scenario with_epsilon(Scalar eps) const {
    ScenarioFields<Scalar> f = fields();
    f.epsilon = eps;
    return validate_scenario(f);
  }

  template <typename NewScalar>
  Scenario<NewScalar> cast() const {
    ScenarioFields<NewScalar> f;
    f.r = r_.template cast<NewScalar>();
    f.c = c_.template cast<NewScalar>();
    f.tau = tau_.template cast<NewScalar>();
    f.epsilon = NewScalar(epsilon_);
    f.ctilde = ctilde_.template cast<NewScalar>();
    return validate_scenario(f);
  }

 private:
  friend Scenario validate_scenario<Scalar>(const ScenarioFields<Scalar>&);
  Scenario() = default;

  Vector<Scalar> r_;
  Vector<Scalar> c_;
  Matrix<Scalar> tau_;
  Matrix<Scalar> gamma_;
  Scalar epsilon_{};
  Vector<Scalar> ctilde_;
};

namespace detail {

template <typename Scalar>
bool positive_finite(Scalar v) {
  using std::isfinite;
  return isfinite(v) && v > Scalar(0);
}

inline std::string entry_name(const char* name, Eigen::Index i) {
  std::ostringstream os;
  os << name << "[" << i + 1 << "]";
  return os.str();
}

inline std::string entry_name(const char* name, Eigen::Index i,
                              Eigen::Index j) {
  std::ostringstream os;
  os << name << "[" << i + 1 << "][" << j + 1 << "]";
  return os.str();
}

}  // namespace detail

template <typename Scalar>
Scenario<Scalar> validate_scenario(const ScenarioFields<Scalar>& raw) {
  const Eigen::Index m = raw.r.size();
  const Eigen::Index n = raw.c.size();
  if (m == 0) throw ValidationError("r must have at least one entry");
  if (n == 0) throw ValidationError("c must have at least one entry");
  if (raw.tau.rows() != m || raw.tau.cols() != n)
    throw ValidationError("tau must be an m x n matrix");

  for (Eigen::Index i = 0; i < m; ++i)
    if (!detail::positive_finite(raw.r(i)))
      throw ValidationError("r must be positive: " +
                            detail::entry_name("r", i));
  for (Eigen::Index j = 0; j < n; ++j)
    if (!detail::positive_finite(raw.c(j)))
      throw ValidationError("c must be positive: " +
                            detail::entry_name("c", j));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!detail::positive_finite(raw.tau(i, j)))
        throw ValidationError("tau must be positive: " +
                              detail::entry_name("tau", i, j));

  Scenario<Scalar> s;
  s.epsilon_ = raw.epsilon.value_or(Scalar(kDefaultEpsilon));
  if (!detail::positive_finite(s.epsilon_))
    throw ValidationError("epsilon must be positive");

  if (raw.ctilde) {
    if (raw.ctilde->size() != n)
      throw ValidationError("ctilde must have length n");
    s.ctilde_ = *raw.ctilde;
  } else {
    const Scalar factor = raw.ctilde_factor.value_or(Scalar(kDefaultCtildeFactor));
    if (!(factor > Scalar(0) && factor < Scalar(1)))
      throw ValidationError("ctilde_factor must lie in (0, 1)");
    s.ctilde_ = factor * raw.c;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!detail::positive_finite(s.ctilde_(j)))
      throw ValidationError("ctilde must be positive: " +
                            detail::entry_name("ctilde", j));
    if (!(s.ctilde_(j) < raw.c(j)))
      throw ValidationError("ctilde must be strictly below c: " +
                            detail::entry_name("ctilde", j));
  }

  s.r_ = raw.r;
  s.c_ = raw.c;
  s.tau_ = raw.tau;
  s.gamma_ = raw.tau.cwiseInverse();
  return s;
}

template <typename Scalar>
struct FeasibilityReport {
  bool feasible = false;
  bool strictly_feasible = false;
  Scalar slack{};  // sum(c) - sum(r)
  bool feasible_shrunk = false;
  bool strictly_feasible_shrunk = false;
  Scalar slack_shrunk{};  // sum(ctilde) - sum(r)
};

// A feasible routing exists iff total demand does not exceed total capacity.
template <typename Scalar>
FeasibilityReport<Scalar> check_feasibility(const Scenario<Scalar>& s) {
  const Scalar demand = s.r().sum();
  const Scalar supply = s.c().sum();
  const Scalar shrunk = s.ctilde().sum();
  FeasibilityReport<Scalar> rep;
  rep.feasible = demand <= supply;
  rep.strictly_feasible = demand < supply;
  rep.slack = supply - demand;
  rep.feasible_shrunk = demand <= shrunk;
  rep.strictly_feasible_shrunk = demand < shrunk;
  rep.slack_shrunk = shrunk - demand;
  return rep;
}

// x_ij = c_j r_i / sum_k c_k: every pool gets the same fraction of its
// capacity, which is a feasible point whenever the scenario is feasible.
template <typename Scalar>
RoutingMatrix<Scalar> proportional_feasible_point(const Scenario<Scalar>& s) {
  if (!check_feasibility(s).feasible)
    throw InfeasibleError("scenario is infeasible: sum(r) > sum(c)");
  return s.r() * (s.c() / s.c().sum()).transpose();
}

template <typename Scalar>
struct CostReport {
  Scalar setup_cost{};       // sum tau_ij x_ij, tasks in setup
  Scalar entropy_penalty{};  // eps sum x_ij log(x_ij / r_i), always <= 0
  Scalar total{};
};

template <typename Scalar>
Scalar setup_cost(const RoutingMatrix<Scalar>& x, const Scenario<Scalar>& s) {
  return s.tau().cwiseProduct(x).sum();
}

template <typename Scalar>
CostReport<Scalar> compute_costs(const RoutingMatrix<Scalar>& x,
                                 const Scenario<Scalar>& s) {
  using std::log;
  if (x.rows() != s.m() || x.cols() != s.n())
    throw ValidationError("routing matrix must be m x n");
  if ((x.array() < Scalar(0)).any())
    throw ValidationError("routing rates must be nonnegative");

  CostReport<Scalar> rep;
  rep.setup_cost = setup_cost(x, s);
  Scalar entropy(0);
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (x(i, j) > Scalar(0)) entropy += x(i, j) * log(x(i, j) / s.r()(i));
  rep.entropy_penalty = s.epsilon() * entropy;
  rep.total = rep.setup_cost + rep.entropy_penalty;
  return rep;
}

}  // namespace fluidlb

#endif  // FLUIDLB_MODEL_HPP
