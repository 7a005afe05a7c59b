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

// Scenario files, trajectory CSV, equilibrium reports and run manifests.
//
// Scenario file (JSON, comments allowed):
//
//   {
//     "m": 2, "n": 2,
//     "r": [16, 8],
//     "c": [15, 10],
//     "tau": [[1, 2], [2, 1]],
//     "epsilon": 0.01,          // optional, default 0.01
//     "ctilde_factor": 0.99     // optional, in (0, 1), default 0.99
//   }
//
// Trajectory CSV columns, in this order:
//
//   t, q_1..q_n, z_1_1..z_m_n, nu_1..nu_n, x_1_1..x_m_n, setup_cost, lyapunov
//
// Quantities a policy does not carry are written as empty fields.

#ifndef FLUIDLB_IO_HPP
#define FLUIDLB_IO_HPP

#include "fluidlb/equilibrium.hpp"
#include "fluidlb/sim.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fluidlb {

ScenarioD parse_scenario(const std::string& text,
                         const std::string& origin = "<string>");
ScenarioD load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioD& s);

// Twelve significant digits; empty for NaN.
std::string format_number(double v);

std::vector<std::string> trajectory_columns(Eigen::Index m, Eigen::Index n);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // empty fields read as NaN

  // Column index, or -1 when absent.
  long column(const std::string& name) const;
  std::vector<double> series(const std::string& name) const;
};

CsvTable read_csv(std::istream& is);

// Pool and type counts implied by the q_* and x_*_* columns.
std::pair<Eigen::Index, Eigen::Index> trajectory_dimensions(const CsvTable& t);

struct EquilibriumSummary {
  std::string policy;
  bool shrunk = false;
  Eigen::MatrixXd x;
  Eigen::VectorXd q;
  std::string multiplier_name;  // "mu" or "nu"
  Eigen::VectorXd multipliers;
  std::optional<Eigen::MatrixXd> z;
  Eigen::VectorXd capacities;
  CostReport<double> costs;
  std::vector<std::pair<std::string, double>> residuals;
  bool unique = true;
  std::vector<std::string> notes;
};

EquilibriumSummary summarize_myopic(const EquilibriumReport<double>& rep,
                                    const ScenarioD& s, bool shrunk);
EquilibriumSummary summarize_proximal(const ProximalEquilibrium& eq,
                                      const ScenarioD& s, bool shrunk);

std::string equilibrium_text(const EquilibriumSummary& sum);
// Long format: quantity,i,j,value (1-based indices, empty when unused).
void write_equilibrium_csv(std::ostream& os, const EquilibriumSummary& sum);

struct SimulationSummary {
  std::optional<MonotonicityReport> monitor;
  std::optional<SystemState> equilibrium;
  double detect_tol = 1e-3;
  double detect_window = 5.0;
  bool convergence_asserted = true;
};

std::string simulation_summary_text(const Trajectory& traj, const ScenarioD& s,
                                    const SimulationSummary& sum);

// Everything needed to rerun a CLI invocation.
struct RunManifest {
  std::string subcommand;
  std::string scenario;
  std::string trajectory;  // input of plot
  std::string policy;
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<long> stride;
  std::optional<bool> shrunk;
  std::optional<unsigned long long> seed;
  std::optional<long> random_scenarios;  // verify only
  std::string kind;
  std::string out;
  std::vector<std::string> outputs;
  std::string tool_version;
};

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

const char* tool_version();

}  // namespace fluidlb

#endif  // FLUIDLB_IO_HPP
