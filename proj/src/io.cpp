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

#include "fluidlb/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>
#include <sstream>

#ifndef FLUIDLB_VERSION
#define FLUIDLB_VERSION "0.0.0"
#endif

namespace fluidlb {

using nlohmann::json;

const char* tool_version() { return FLUIDLB_VERSION; }

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void schema_error(const std::string& origin,
                               const std::string& what) {
  throw ParseError(origin + ": " + what);
}

double number_at(const json& v, const std::string& origin,
                 const std::string& where) {
  if (!v.is_number()) schema_error(origin, where + " must be a number");
  return v.get<double>();
}

Eigen::VectorXd vector_at(const json& doc, const char* key, long expected,
                          const std::string& origin) {
  const json& v = doc.at(key);
  if (!v.is_array()) schema_error(origin, std::string(key) + " must be an array");
  if (static_cast<long>(v.size()) != expected)
    schema_error(origin, std::string(key) + " must have " +
                             std::to_string(expected) + " entries, found " +
                             std::to_string(v.size()));
  Eigen::VectorXd out(expected);
  for (long k = 0; k < expected; ++k)
    out(k) = number_at(v[static_cast<std::size_t>(k)], origin,
                       std::string(key) + "[" + std::to_string(k + 1) + "]");
  return out;
}

long count_at(const json& doc, const char* key, const std::string& origin) {
  if (!doc.contains(key)) schema_error(origin, std::string("missing key '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<long>() < 1)
    schema_error(origin, std::string(key) + " must be a positive integer");
  return v.get<long>();
}

}  // namespace

ScenarioD parse_scenario(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto [line, col] =
        line_column(text, e.byte > 0 ? static_cast<std::size_t>(e.byte - 1) : 0);
    std::ostringstream os;
    os << origin << ":" << line << ":" << col << ": malformed scenario file ("
       << e.what() << ")";
    throw ParseError(os.str());
  }
  if (!doc.is_object()) schema_error(origin, "top level must be an object");

  static const std::set<std::string> known{"m",   "n",       "r",
                                           "c",   "tau",     "epsilon",
                                           "ctilde_factor"};
  for (const auto& item : doc.items())
    if (!known.count(item.key()))
      schema_error(origin, "unknown key '" + item.key() + "'");
  for (const char* key : {"r", "c", "tau"})
    if (!doc.contains(key))
      schema_error(origin, std::string("missing key '") + key + "'");

  const long m = count_at(doc, "m", origin);
  const long n = count_at(doc, "n", origin);

  ScenarioFields<double> f;
  f.r = vector_at(doc, "r", m, origin);
  f.c = vector_at(doc, "c", n, origin);
  const json& tau = doc.at("tau");
  if (!tau.is_array() || static_cast<long>(tau.size()) != m)
    schema_error(origin, "tau must be an array of m = " + std::to_string(m) +
                             " rows");
  f.tau.resize(m, n);
  for (long i = 0; i < m; ++i) {
    const json& row = tau[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<long>(row.size()) != n)
      schema_error(origin, "tau row " + std::to_string(i + 1) + " must have n = " +
                               std::to_string(n) + " entries");
    for (long j = 0; j < n; ++j)
      f.tau(i, j) = number_at(row[static_cast<std::size_t>(j)], origin,
                              "tau[" + std::to_string(i + 1) + "][" +
                                  std::to_string(j + 1) + "]");
  }
  if (doc.contains("epsilon"))
    f.epsilon = number_at(doc.at("epsilon"), origin, "epsilon");
  if (doc.contains("ctilde_factor"))
    f.ctilde_factor = number_at(doc.at("ctilde_factor"), origin, "ctilde_factor");

  try {
    return validate_scenario(f);
  } catch (const ValidationError& e) {
    throw ValidationError(origin + ": " + e.what());
  }
}

ScenarioD load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path), path);
}

std::string scenario_to_json(const ScenarioD& s) {
  json doc;
  doc["m"] = s.m();
  doc["n"] = s.n();
  doc["r"] = std::vector<double>(s.r().data(), s.r().data() + s.m());
  doc["c"] = std::vector<double>(s.c().data(), s.c().data() + s.n());
  json tau = json::array();
  for (Eigen::Index i = 0; i < s.m(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < s.n(); ++j) row.push_back(s.tau()(i, j));
    tau.push_back(row);
  }
  doc["tau"] = tau;
  doc["epsilon"] = s.epsilon();
  // Exact only when all pools share one shrink ratio.
  doc["ctilde_factor"] = s.ctilde()(0) / s.c()(0);
  return doc.dump(2) + "\n";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> trajectory_columns(Eigen::Index m, Eigen::Index n) {
  std::vector<std::string> cols{"t"};
  for (Eigen::Index j = 0; j < n; ++j) cols.push_back("q_" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cols.push_back("z_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  for (Eigen::Index j = 0; j < n; ++j) cols.push_back("nu_" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      cols.push_back("x_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  cols.push_back("setup_cost");
  cols.push_back("lyapunov");
  return cols;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.empty()) throw ValidationError("cannot write an empty trajectory");
  const Eigen::Index m = traj.signals.front().x.rows();
  const Eigen::Index n = traj.signals.front().x.cols();
  const auto cols = trajectory_columns(m, n);
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << "\n";

  std::string line;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const SystemState& x = traj.states[k];
    const StepSignals& sig = traj.signals[k];
    line = format_number(traj.times[k]);
    for (Eigen::Index j = 0; j < n; ++j) line += "," + format_number(x.q(j));
    const bool has_z = x.z.size() > 0;
    const bool has_nu = x.nu.size() > 0;
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        line += "," + (has_z ? format_number(x.z(i, j)) : std::string());
    for (Eigen::Index j = 0; j < n; ++j)
      line += "," + (has_nu ? format_number(x.nu(j)) : std::string());
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) line += "," + format_number(sig.x(i, j));
    line += "," + format_number(sig.setup_cost);
    line += "," + format_number(sig.lyapunov);
    os << line << "\n";
  }
}

long CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return static_cast<long>(k);
  return -1;
}

std::vector<double> CsvTable::series(const std::string& name) const {
  const long col = column(name);
  if (col < 0) throw ParseError("missing column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[static_cast<std::size_t>(col)]);
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    while (!field.empty() && field.front() == ' ') field.erase(field.begin());
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line) || line.empty())
    throw ParseError("empty CSV: no header");
  t.header = split_fields(line);
  long lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != t.header.size())
      throw ParseError("CSV line " + std::to_string(lineno) + ": expected " +
                       std::to_string(t.header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (fields[k].empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(fields[k].c_str(), &end);
      if (end != fields[k].c_str() + fields[k].size())
        throw ParseError("CSV line " + std::to_string(lineno) + ", column " +
                         std::to_string(k + 1) + ": not a number '" +
                         fields[k] + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::pair<Eigen::Index, Eigen::Index> trajectory_dimensions(const CsvTable& t) {
  Eigen::Index n = 0;
  while (t.column("q_" + std::to_string(n + 1)) >= 0) ++n;
  Eigen::Index m = 0;
  while (n > 0 && t.column("x_" + std::to_string(m + 1) + "_1") >= 0) ++m;
  return {m, n};
}

EquilibriumSummary summarize_myopic(const EquilibriumReport<double>& rep,
                                    const ScenarioD& s, bool shrunk) {
  EquilibriumSummary sum;
  sum.policy = "myopic";
  sum.shrunk = shrunk;
  sum.x = rep.x_star;
  sum.q = rep.q_star;
  sum.multiplier_name = "mu";
  sum.multipliers = rep.mu_star;
  sum.capacities = s.c();
  sum.costs = rep.costs;
  sum.residuals = {{"primal_infeas", rep.kkt.primal_infeas},
                   {"dual_infeas", rep.kkt.dual_infeas},
                   {"comp_slack", rep.kkt.comp_slack},
                   {"stationarity", rep.kkt.stationarity},
                   {"field_norm", myopic_field(rep.q_star, s).norm()}};
  sum.unique = rep.unique;
  if (!rep.unique)
    sum.notes.push_back(
        "sum(r) = sum(c): if every pool saturates, mu* + K*1 (K >= 0) is "
        "equally optimal and q* shifts by c*K");
  for (Eigen::Index j = 0; j < s.n(); ++j)
    if (rep.saturated[static_cast<std::size_t>(j)])
      sum.notes.push_back("pool " + std::to_string(j + 1) +
                          " saturated: q* = c (1 + mu*), tasks wait " +
                          format_number(rep.mu_star(j)) + " s");
  return sum;
}

EquilibriumSummary summarize_proximal(const ProximalEquilibrium& eq,
                                      const ScenarioD& /*s*/, bool shrunk) {
  EquilibriumSummary sum;
  sum.policy = "proximal";
  sum.shrunk = shrunk;
  sum.x = eq.x;
  sum.q = eq.q;
  sum.multiplier_name = "nu";
  sum.multipliers = eq.nu;
  sum.z = eq.z;
  sum.capacities = eq.capacities;
  sum.costs = eq.costs;
  sum.residuals = {{"primal_infeas", eq.kkt.primal_infeas},
                   {"dual_infeas", eq.kkt.dual_infeas},
                   {"comp_slack", eq.kkt.comp_slack},
                   {"stationarity", eq.kkt.stationarity},
                   {"field_norm", eq.field_norm}};
  sum.notes.push_back("settled after " + format_number(eq.time) + " s");
  return sum;
}

namespace {

std::string vector_text(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index k = 0; k < v.size(); ++k)
    out += (k ? ", " : "") + format_number(v(k));
  return out + "]";
}

std::string matrix_text(const Eigen::MatrixXd& x) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out += (i ? ", " : "") + vector_text(x.row(i).transpose());
  return out + "]";
}

}  // namespace

std::string equilibrium_text(const EquilibriumSummary& sum) {
  std::ostringstream os;
  os << "policy: " << sum.policy << (sum.shrunk ? " (shrunk capacities)" : "")
     << "\n";
  os << "capacities: " << vector_text(sum.capacities) << "\n";
  os << "x*: " << matrix_text(sum.x) << "\n";
  os << sum.multiplier_name << "*: " << vector_text(sum.multipliers) << "\n";
  if (sum.z) os << "z*: " << matrix_text(*sum.z) << "\n";
  os << "q*: " << vector_text(sum.q) << "\n";
  os << "setup_cost: " << format_number(sum.costs.setup_cost) << "\n";
  os << "entropy_penalty: " << format_number(sum.costs.entropy_penalty) << "\n";
  os << "total_cost: " << format_number(sum.costs.total) << "\n";
  for (const auto& [name, value] : sum.residuals)
    os << name << ": " << format_number(value) << "\n";
  os << "unique: " << (sum.unique ? "yes" : "no") << "\n";
  for (const auto& note : sum.notes) os << "note: " << note << "\n";
  return os.str();
}

void write_equilibrium_csv(std::ostream& os, const EquilibriumSummary& sum) {
  os << "quantity,i,j,value\n";
  for (Eigen::Index i = 0; i < sum.x.rows(); ++i)
    for (Eigen::Index j = 0; j < sum.x.cols(); ++j)
      os << "x," << i + 1 << "," << j + 1 << "," << format_number(sum.x(i, j))
         << "\n";
  if (sum.z)
    for (Eigen::Index i = 0; i < sum.z->rows(); ++i)
      for (Eigen::Index j = 0; j < sum.z->cols(); ++j)
        os << "z," << i + 1 << "," << j + 1 << ","
           << format_number((*sum.z)(i, j)) << "\n";
  for (Eigen::Index j = 0; j < sum.multipliers.size(); ++j)
    os << sum.multiplier_name << ",," << j + 1 << ","
       << format_number(sum.multipliers(j)) << "\n";
  for (Eigen::Index j = 0; j < sum.q.size(); ++j)
    os << "q,," << j + 1 << "," << format_number(sum.q(j)) << "\n";
  os << "setup_cost,,," << format_number(sum.costs.setup_cost) << "\n";
  os << "entropy_penalty,,," << format_number(sum.costs.entropy_penalty) << "\n";
  os << "total_cost,,," << format_number(sum.costs.total) << "\n";
  for (const auto& [name, value] : sum.residuals)
    os << name << ",,," << format_number(value) << "\n";
}

std::string simulation_summary_text(const Trajectory& traj, const ScenarioD& s,
                                    const SimulationSummary& sum) {
  std::ostringstream os;
  const SystemState& last = traj.states.back();
  os << "policy: " << to_string(traj.meta.policy) << "\n";
  os << "dt: " << format_number(traj.meta.dt) << "\n";
  os << "T: " << format_number(traj.times.back()) << "\n";
  os << "scenario_hash: " << traj.meta.scenario_hash << "\n";
  os << "final q: " << vector_text(last.q) << "\n";
  if (last.z.size() > 0) os << "final z: " << matrix_text(last.z) << "\n";
  if (last.nu.size() > 0) os << "final nu: " << vector_text(last.nu) << "\n";
  os << "final x: " << matrix_text(traj.signals.back().x) << "\n";
  os << "final setup_cost: " << format_number(traj.signals.back().setup_cost)
     << "\n";
  os << "capacities: " << vector_text(s.c()) << "\n";
  if (sum.monitor) {
    os << "lyapunov monitor: "
       << (sum.monitor->kind == LyapunovKind::kDualOfMu
               ? "D(mu(q)) nondecreasing"
               : "saddle distance nonincreasing")
       << ", violations = " << sum.monitor->violations
       << ", worst = " << format_number(sum.monitor->worst_violation)
       << ", slack = " << format_number(sum.monitor->slack) << "\n";
  } else {
    os << "lyapunov monitor: none\n";
  }
  os << "equilibrium detection (tol " << format_number(sum.detect_tol)
     << ", window " << format_number(sum.detect_window) << " s): "
     << (sum.equilibrium ? "detected" : "not detected") << "\n";
  if (sum.equilibrium)
    os << "equilibrium q: " << vector_text(sum.equilibrium->q) << "\n";
  os << "convergence: "
     << (sum.convergence_asserted
             ? "asserted by theory for this policy"
             : "not asserted (setup delays applied to arrivals; the "
               "equilibrium is shared but convergence is not guaranteed)")
     << "\n";
  return os.str();
}

std::string manifest_to_json(const RunManifest& m) {
  json doc;
  doc["tool"] = "fluidlb";
  doc["tool_version"] = m.tool_version;
  doc["subcommand"] = m.subcommand;
  if (!m.scenario.empty()) doc["scenario"] = m.scenario;
  if (!m.trajectory.empty()) doc["trajectory"] = m.trajectory;
  if (!m.policy.empty()) doc["policy"] = m.policy;
  if (m.dt) doc["dt"] = *m.dt;
  if (m.T) doc["T"] = *m.T;
  if (m.stride) doc["stride"] = *m.stride;
  if (m.shrunk) doc["shrunk"] = *m.shrunk;
  if (m.seed) doc["seed"] = *m.seed;
  if (m.random_scenarios) doc["random_scenarios"] = *m.random_scenarios;
  if (!m.kind.empty()) doc["kind"] = m.kind;
  if (!m.out.empty()) doc["out"] = m.out;
  doc["outputs"] = m.outputs;
  return doc.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
  RunManifest m;
  try {
    m.subcommand = doc.at("subcommand").get<std::string>();
    m.tool_version = doc.value("tool_version", std::string());
    m.scenario = doc.value("scenario", std::string());
    m.trajectory = doc.value("trajectory", std::string());
    m.policy = doc.value("policy", std::string());
    if (doc.contains("dt")) m.dt = doc.at("dt").get<double>();
    if (doc.contains("T")) m.T = doc.at("T").get<double>();
    if (doc.contains("stride")) m.stride = doc.at("stride").get<long>();
    if (doc.contains("shrunk")) m.shrunk = doc.at("shrunk").get<bool>();
    if (doc.contains("seed")) m.seed = doc.at("seed").get<unsigned long long>();
    if (doc.contains("random_scenarios"))
      m.random_scenarios = doc.at("random_scenarios").get<long>();
    m.kind = doc.value("kind", std::string());
    m.out = doc.value("out", std::string());
    if (doc.contains("outputs"))
      m.outputs = doc.at("outputs").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid manifest: ") + e.what());
  }
  return m;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw Error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

}  // namespace fluidlb
