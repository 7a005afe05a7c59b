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

#ifndef FLUIDLB_TYPES_HPP
#define FLUIDLB_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace fluidlb {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Dispatch rates x_ij (tasks/sec); row i is dispatcher i, column j is pool j.
template <typename Scalar>
using RoutingMatrix = Matrix<Scalar>;

// Per-pool waiting times mu_j (sec).
template <typename Scalar>
using DelayVector = Vector<Scalar>;

// Fractions on the unit simplex.
template <typename Scalar>
using SimplexVector = Vector<Scalar>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Iterative solver gave up. Carries the last iterate and its residual.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, Eigen::VectorXd last_iterate,
              double residual)
      : Error(what), last_iterate_(std::move(last_iterate)),
        residual_(residual) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double residual() const { return residual_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_;
};

class StabilityError : public Error {
 public:
  StabilityError(const std::string& what, double suggested_dt)
      : Error(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, long step)
      : Error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

}  // namespace fluidlb

#endif  // FLUIDLB_TYPES_HPP
