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

#include "fluidlb/verify.hpp"

#include "fluidlb/equilibrium.hpp"
#include "fluidlb/oracles.hpp"
#include "fluidlb/proximal.hpp"
#include "fluidlb/random.hpp"
#include "fluidlb/softmin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace fluidlb {

namespace {

using LD = long double;

PropertyResult property(const char* name, double threshold) {
  PropertyResult r;
  r.name = name;
  r.threshold = threshold;
  return r;
}

void record(PropertyResult& r, double error, const std::string& what) {
  ++r.cases;
  if (!(error <= r.threshold)) {  // NaN fails too
    ++r.failures;
    r.passed = false;
    if (r.detail.empty()) r.detail = what;
  }
  if (std::isnan(error) || error > r.worst) r.worst = error;
}

void merge(PropertyResult& into, const PropertyResult& from) {
  into.cases += from.cases;
  into.failures += from.failures;
  into.passed = into.passed && from.passed;
  if (std::isnan(from.worst) || from.worst > into.worst) into.worst = from.worst;
  if (into.detail.empty()) into.detail = from.detail;
}

std::string describe(const char* what, double error) {
  std::ostringstream os;
  os << what << ": error " << error;
  return os.str();
}

template <typename Scalar>
Vector<Scalar> uniform_vector(std::mt19937_64& rng, Eigen::Index size,
                              double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector<Scalar> v(size);
  for (Eigen::Index k = 0; k < size; ++k) v(k) = Scalar(u(rng));
  return v;
}

template <typename Scalar>
Matrix<Scalar> uniform_matrix(std::mt19937_64& rng, Eigen::Index rows,
                              Eigen::Index cols, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix<Scalar> x(rows, cols);
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = Scalar(u(rng));
  return x;
}

template <typename Derived>
double sup_norm(const Eigen::MatrixBase<Derived>& x) {
  return x.size() == 0 ? 0.0 : double(x.cwiseAbs().maxCoeff());
}

struct QpInstance {
  Eigen::VectorXd gamma, z, nu;
  double rate = 0.0;
};

QpInstance random_qp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> rate(0.5, 5.0);
  QpInstance q;
  const int n = dim(rng);
  q.gamma = uniform_vector<double>(rng, n, 0.5, 3.0).cwiseInverse();
  q.z = uniform_vector<double>(rng, n, 0.0, 5.0);
  q.nu = uniform_vector<double>(rng, n, 0.0, 3.0);
  q.rate = rate(rng);
  return q;
}

}  // namespace

Fault fault_from_string(const std::string& name) {
  if (name.empty() || name == "none") return Fault::kNone;
  if (name == "gradient") return Fault::kGradient;
  throw ValidationError("unknown fault '" + name + "'");
}

PropertyResult check_softmin_bracket(std::mt19937_64& rng, long count) {
  PropertyResult r = property("softmin-bracket", 0.0);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> log_eps(std::log(1e-3), 0.0);
  for (long k = 0; k < count; ++k) {
    const Eigen::VectorXd y = uniform_vector<double>(rng, dim(rng), -10.0, 10.0);
    const double eps = std::exp(log_eps(rng));
    const double phi = softmin_value(y, eps);
    const double lo = y.minCoeff();
    const double floor = lo - eps * std::log(double(y.size()));
    const double error = std::max({phi - lo, floor - phi, 0.0});
    record(r, error, describe("bracket violated", error));
  }
  return r;
}

PropertyResult check_translation_identity(std::mt19937_64& rng, long count) {
  PropertyResult r = property("translation-identity", 1e-12);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  std::uniform_real_distribution<double> log_eps(std::log(1e-3), 0.0);
  for (long k = 0; k < count; ++k) {
    const Eigen::VectorXd y = uniform_vector<double>(rng, dim(rng), -10.0, 10.0);
    const double a = shift(rng);
    const double eps = std::exp(log_eps(rng));
    const Eigen::VectorXd ya = (y.array() + a).matrix();
    const double error =
        std::abs(softmin_value(ya, eps) - softmin_value(y, eps) - a);
    record(r, error, describe("phi(y + a) - phi(y) - a", error));
  }
  return r;
}

PropertyResult check_softmin_gradient(std::mt19937_64& rng, long count) {
  PropertyResult r = property("softmin-gradient-consistency", 1e-8);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_real_distribution<double> eps_dist(0.05, 1.0);
  for (long k = 0; k < count; ++k) {
    const Vector<LD> y = uniform_vector<LD>(rng, dim(rng), -1.0, 1.0);
    const LD eps = eps_dist(rng);
    const Vector<LD> grad = softmin_gradient(y, eps);
    const Vector<LD> direct = oracle::direct_softmax<LD>(y, eps);
    const Vector<LD> fd = oracle::central_difference(
        [&](const Vector<LD>& v) { return softmin_value(v, eps); }, y, LD(1e-6));
    const double error =
        std::max(sup_norm(grad - direct), sup_norm(grad - fd));
    record(r, error, describe("softmax mismatch", error));
  }
  return r;
}

PropertyResult check_dual_gradient(const ScenarioD& s, std::mt19937_64& rng,
                                   long points, Fault fault) {
  PropertyResult r = property("gradient-consistency", 1e-6);
  const Scenario<LD> sl = s.cast<LD>();
  for (long k = 0; k < points; ++k) {
    const Vector<LD> mu = uniform_vector<LD>(rng, s.n(), 0.0, 2.0);
    Vector<LD> grad = dual_gradient(mu, sl);
    if (fault == Fault::kGradient) grad(0) += LD(1e-3);
    const Vector<LD> fd = oracle::central_difference(
        [&](const Vector<LD>& v) { return dual_value(v, sl); }, mu, LD(1e-6));
    const double error = sup_norm(grad - fd) / std::max(sup_norm(fd), 1.0);
    record(r, error, describe("dual gradient vs finite differences", error));
  }
  return r;
}

PropertyResult check_dual_concavity(const ScenarioD& s, std::mt19937_64& rng,
                                    long segments) {
  PropertyResult r = property("dual-concavity", 1e-9);
  for (long k = 0; k < segments; ++k) {
    const Eigen::VectorXd a = uniform_vector<double>(rng, s.n(), 0.0, 3.0);
    const Eigen::VectorXd b = uniform_vector<double>(rng, s.n(), 0.0, 3.0);
    const Eigen::VectorXd mid = 0.5 * (a + b);
    const double da = dual_value(a, s);
    const double db = dual_value(b, s);
    const double dm = dual_value(mid, s);
    const double error =
        std::max(0.0, 0.5 * (da + db) - dm) /
        std::max({1.0, std::abs(da), std::abs(db)});
    record(r, error, describe("midpoint below chord", error));
  }
  return r;
}

PropertyResult check_reduced_gradients(const ScenarioD& s,
                                       std::mt19937_64& rng, long points) {
  PropertyResult r = property("reduced-gradient-consistency", 1e-5);
  const Scenario<LD> sl = s.cast<LD>();
  const Vector<LD> caps = sl.ctilde();
  const LD h = 1e-7L;
  for (long k = 0; k < points; ++k) {
    const Matrix<LD> z = uniform_matrix<LD>(rng, s.m(), s.n(), 0.0, 5.0);
    const Vector<LD> nu = uniform_vector<LD>(rng, s.n(), 0.0, 3.0);
    const ReducedGradients<LD> g = reduced_gradients(z, nu, sl, caps);
    const Matrix<LD> fd_z = oracle::central_difference(
        [&](const Matrix<LD>& zz) { return reduced_lagrangian(zz, nu, sl, caps); },
        z, h);
    const Vector<LD> fd_nu = oracle::central_difference(
        [&](const Vector<LD>& nn) { return reduced_lagrangian(z, nn, sl, caps); },
        nu, h);
    const double scale =
        std::max({sup_norm(fd_z), sup_norm(fd_nu), 1.0});
    const double error =
        std::max(sup_norm(g.dz - fd_z), sup_norm(g.dnu - fd_nu)) / scale;
    record(r, error, describe("reduced gradient vs finite differences", error));
  }
  return r;
}

PropertyResult check_qp_oracle(std::mt19937_64& rng, long count) {
  PropertyResult r = property("qp-oracle-equivalence", 1e-6);
  for (long k = 0; k < count; ++k) {
    const QpInstance q = random_qp(rng);
    const Eigen::VectorXd exact =
        solve_dispatcher_qp<double>(q.gamma, q.z, q.nu, q.rate).x;
    const Eigen::VectorXd brute =
        oracle::brute_force_dispatcher_qp<double>(q.gamma, q.z, q.nu, q.rate);
    const double error = sup_norm(exact - brute);
    record(r, error, describe("dispatcher QP vs projected gradient", error));
  }
  return r;
}

PropertyResult check_qp_kkt(std::mt19937_64& rng, long count) {
  PropertyResult r = property("qp-kkt", 1e-10);
  for (long k = 0; k < count; ++k) {
    const QpInstance q = random_qp(rng);
    const DispatcherSolution<double> sol =
        solve_dispatcher_qp<double>(q.gamma, q.z, q.nu, q.rate);
    const Eigen::VectorXd tau = q.gamma.cwiseInverse();
    // Objective gradient; every positive entry sits at -level, the rest
    // at or above it.
    const Eigen::VectorXd grad =
        tau + q.nu + tau.cwiseProduct(sol.x - q.gamma.cwiseProduct(q.z));
    const double lambda = -sol.level;
    double error = std::abs(sol.x.sum() - q.rate);
    error = std::max(error, (-sol.x).cwiseMax(0.0).maxCoeff());
    for (Eigen::Index j = 0; j < sol.x.size(); ++j)
      error = std::max(error, sol.x(j) > 0.0 ? std::abs(grad(j) - lambda)
                                             : std::max(0.0, lambda - grad(j)));
    record(r, error, describe("dispatcher QP KKT residual", error));
  }
  return r;
}

PropertyResult check_kkt_round_trip(const ScenarioD& s) {
  PropertyResult r = property("kkt-round-trip", 1e-6);
  try {
    const EquilibriumReport<double> rep = solve_equilibrium(s);
    record(r, rep.kkt.max(), describe("KKT residual at solve_dual optimum",
                                      rep.kkt.max()));
    const Eigen::VectorXd q = polish_myopic_fixed_point(rep.q_star, s);
    const double field = myopic_field(q, s).norm();
    record(r, field, describe("myopic field at q*", field));
  } catch (const Error& e) {
    record(r, std::numeric_limits<double>::infinity(), e.what());
  }
  return r;
}

PropertyResult check_feasibility_characterization(std::mt19937_64& rng,
                                                  long count) {
  PropertyResult r = property("feasibility-characterization", 0.0);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> value(1, 10);
  std::uniform_int_distribution<int> mode(0, 2);
  long feasible = 0, boundary = 0;
  for (long k = 0; k < count; ++k) {
    ScenarioFields<double> f;
    const int m = dim(rng), n = dim(rng);
    f.r.resize(m);
    f.c.resize(n);
    f.tau = Eigen::MatrixXd::Ones(m, n);
    for (int j = 0; j < n; ++j) f.c(j) = value(rng);
    for (int i = 0; i < m; ++i) f.r(i) = value(rng);
    if (mode(rng) == 0) {
      // Force sum(r) = sum(c) exactly where the last rate stays positive.
      const double rest = f.r.sum() - f.r(m - 1);
      if (f.c.sum() - rest >= 1.0) f.r(m - 1) = f.c.sum() - rest;
    }
    const ScenarioD s = validate_scenario(f);
    const bool claimed = check_feasibility(s).feasible;
    bool found = false;
    try {
      const Eigen::MatrixXd x = proportional_feasible_point(s);
      found = primal_infeasibility(x, s, s.c()) <= 1e-12 * s.c().sum();
    } catch (const InfeasibleError&) {
      found = false;
    }
    feasible += claimed;
    boundary += s.r().sum() == s.c().sum();
    record(r, claimed == found ? 0.0 : 1.0,
           claimed ? "feasible instance without a feasible point"
                   : "infeasible instance with a feasible point");
  }
  if (r.passed)
    r.detail = std::to_string(feasible) + " feasible (" +
               std::to_string(boundary) + " with sum(r) = sum(c)), " +
               std::to_string(r.cases - feasible) + " infeasible";
  return r;
}

bool VerifyReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

std::vector<std::string> VerifyReport::failing() const {
  std::vector<std::string> names;
  for (const auto& p : properties)
    if (!p.passed) names.push_back(p.name);
  return names;
}

VerifyReport run_verification(const ScenarioD& s, const VerifyOptions& opts) {
  auto stream = [&](std::uint64_t k) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.seed),
                      static_cast<std::uint32_t>(opts.seed >> 32),
                      static_cast<std::uint32_t>(k)};
    return std::mt19937_64(seq);
  };

  VerifyReport rep;
  {
    auto rng = stream(1);
    rep.properties.push_back(check_softmin_bracket(rng, 5 * opts.random_cases));
  }
  {
    auto rng = stream(2);
    rep.properties.push_back(
        check_translation_identity(rng, 5 * opts.random_cases));
  }
  {
    auto rng = stream(3);
    rep.properties.push_back(check_softmin_gradient(rng, opts.random_cases));
  }

  std::vector<ScenarioD> scenarios{s};
  {
    auto rng = stream(4);
    for (long k = 0; k < opts.random_scenarios; ++k)
      scenarios.push_back(random_feasible_scenario(rng));
  }
  PropertyResult grad = property("gradient-consistency", 0.0);
  PropertyResult concave = property("dual-concavity", 0.0);
  PropertyResult reduced = property("reduced-gradient-consistency", 0.0);
  PropertyResult kkt = property("kkt-round-trip", 0.0);
  auto rng = stream(5);
  for (const ScenarioD& sc : scenarios) {
    const PropertyResult g = check_dual_gradient(sc, rng, 5, opts.fault);
    grad.threshold = g.threshold;
    merge(grad, g);
    const PropertyResult c = check_dual_concavity(sc, rng, 5);
    concave.threshold = c.threshold;
    merge(concave, c);
    const PropertyResult rg = check_reduced_gradients(sc, rng, 3);
    reduced.threshold = rg.threshold;
    merge(reduced, rg);
    const PropertyResult k = check_kkt_round_trip(sc);
    kkt.threshold = k.threshold;
    merge(kkt, k);
  }
  rep.properties.push_back(grad);
  rep.properties.push_back(concave);
  rep.properties.push_back(reduced);
  {
    auto r = stream(6);
    rep.properties.push_back(check_qp_oracle(r, opts.random_cases));
  }
  {
    auto r = stream(7);
    rep.properties.push_back(check_qp_kkt(r, opts.random_cases));
  }
  rep.properties.push_back(kkt);
  {
    auto r = stream(8);
    rep.properties.push_back(
        check_feasibility_characterization(r, opts.random_cases));
  }
  return rep;
}

std::string verify_report_text(const VerifyReport& rep) {
  std::ostringstream os;
  for (const auto& p : rep.properties) {
    os << (p.passed ? "PASS " : "FAIL ") << p.name << ": " << p.cases
       << " cases, " << p.failures << " failures, worst " << p.worst
       << " (threshold " << p.threshold << ")";
    if (!p.detail.empty()) os << "; " << p.detail;
    os << "\n";
  }
  os << (rep.passed() ? "all properties hold" : "property failure") << "\n";
  return os.str();
}

}  // namespace fluidlb
