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

// fluidlb command-line tool.
//
// Exit codes: 0 ok, 1 parse or validation error, 2 infeasible scenario,
// 3 unstable step size, 4 property failure, 5 solver failure.

#include "fluidlb/io.hpp"
#include "fluidlb/plot.hpp"
#include "fluidlb/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace fluidlb;
namespace fs = std::filesystem;

enum ExitCode {
  kOk = 0,
  kParse = 1,
  kInfeasible = 2,
  kStability = 3,
  kProperty = 4,
  kSolver = 5,
};

// "1.0" rather than "1" for whole numbers.
std::string decimal(double v) {
  std::string s = format_number(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string output_path(const std::string& prefix, const std::string& suffix) {
  return prefix + "_" + suffix;
}

void write_manifest(const std::string& path, RunManifest m) {
  m.tool_version = tool_version();
  write_text_file(path, manifest_to_json(m));
}

int run_feasibility(const RunManifest& m) {
  const ScenarioD s = load_scenario(m.scenario);
  const FeasibilityReport<double> rep = check_feasibility(s);
  std::cout << (rep.feasible ? "feasible" : "infeasible")
            << ", slack = " << decimal(rep.slack) << "\n";
  std::cout << "strictly feasible: " << (rep.strictly_feasible ? "yes" : "no")
            << "\n";
  std::cout << "shrunk capacities: "
            << (rep.feasible_shrunk ? "feasible" : "infeasible")
            << ", slack = " << decimal(rep.slack_shrunk) << "\n";
  return rep.feasible ? kOk : kInfeasible;
}

int run_equilibrium(RunManifest m) {
  const ScenarioD s = load_scenario(m.scenario);
  const Policy policy = policy_from_string(m.policy);
  const bool shrunk = m.shrunk.value_or(false);
  const Eigen::VectorXd caps = shrunk ? s.ctilde() : s.c();
  if (s.r().sum() > caps.sum())
    throw InfeasibleError(std::string("scenario is infeasible") +
                          (shrunk ? " for the shrunk capacities" : "") +
                          ": sum(r) > sum(c)");

  EquilibriumSummary sum;
  if (policy == Policy::kProximal) {
    sum = summarize_proximal(settle_proximal(s, caps), s, shrunk);
  } else {
    const ScenarioD target = shrunk ? s.with_capacities(caps) : s;
    sum = summarize_myopic(solve_equilibrium(target), target, shrunk);
  }
  const std::string text = equilibrium_text(sum);
  std::cout << text;
  if (!m.out.empty()) {
    const std::string txt = output_path(m.out, "equilibrium.txt");
    const std::string csv = output_path(m.out, "equilibrium.csv");
    write_text_file(txt, text);
    std::ostringstream os;
    write_equilibrium_csv(os, sum);
    write_text_file(csv, os.str());
    m.outputs = {txt, csv};
    write_manifest(output_path(m.out, "manifest.json"), m);
  }
  return kOk;
}

// Uniform draws: q_j in [0, 2 c_j], z_ij in [0, 2 r_i tau_ij], nu_j in [0, 2].
SystemState random_state(Policy policy, const ScenarioD& s,
                         unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemState x = zero_state(policy, s);
  for (Eigen::Index j = 0; j < s.n(); ++j) x.q(j) = 2.0 * s.c()(j) * u(rng);
  if (policy == Policy::kProximal) {
    for (Eigen::Index i = 0; i < s.m(); ++i)
      for (Eigen::Index j = 0; j < s.n(); ++j)
        x.z(i, j) = 2.0 * s.r()(i) * s.tau()(i, j) * u(rng);
    for (Eigen::Index j = 0; j < s.n(); ++j) x.nu(j) = 2.0 * u(rng);
  }
  return x;
}

int run_simulate(RunManifest m) {
  const ScenarioD s = load_scenario(m.scenario);
  const Policy policy = policy_from_string(m.policy);
  if (!check_feasibility(s).feasible)
    throw InfeasibleError("scenario is infeasible: sum(r) > sum(c)");

  IntegrateOptions opts;
  opts.dt = m.dt.value_or(opts.dt);
  opts.T = m.T.value_or(opts.T);
  opts.stride = m.stride.value_or(opts.stride);
  if (policy == Policy::kProximal)
    opts.reference = find_reference_saddle(s, s.ctilde());

  const SystemState x0 =
      m.seed ? random_state(policy, s, *m.seed) : zero_state(policy, s);
  const Trajectory traj = integrate(policy, x0, s, opts);

  SimulationSummary sum;
  if (policy == Policy::kMyopic)
    sum.monitor = monitor_lyapunov(traj, s, LyapunovKind::kDualOfMu);
  else if (policy == Policy::kProximal)
    sum.monitor = monitor_lyapunov(traj, s, LyapunovKind::kSaddleDistance,
                                   opts.reference);
  sum.convergence_asserted = policy != Policy::kMyopicDelayed;
  sum.equilibrium =
      detect_equilibrium(traj, s, sum.detect_tol, sum.detect_window);
  const std::string text = simulation_summary_text(traj, s, sum);

  const std::string csv = output_path(m.out, "trajectory.csv");
  const std::string txt = output_path(m.out, "summary.txt");
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  write_text_file(csv, os.str());
  write_text_file(txt, text);
  m.outputs = {csv, txt};
  write_manifest(output_path(m.out, "manifest.json"), m);
  std::cout << text;
  return kOk;
}

// Capacities for the dashed lines: the explicit scenario, else the one named
// by the manifest written next to <prefix>_trajectory.csv.
std::optional<Eigen::VectorXd> plot_capacities(RunManifest& m) {
  std::string scenario = m.scenario;
  const std::string suffix = "_trajectory.csv";
  const std::string& t = m.trajectory;
  if (scenario.empty() && t.size() > suffix.size() &&
      t.compare(t.size() - suffix.size(), suffix.size(), suffix) == 0) {
    const std::string manifest =
        t.substr(0, t.size() - suffix.size()) + "_manifest.json";
    if (fs::exists(manifest))
      scenario = manifest_from_json(read_text_file(manifest)).scenario;
  }
  if (scenario.empty()) return std::nullopt;
  m.scenario = scenario;
  return load_scenario(scenario).c();
}

int run_plot(RunManifest m) {
  const PlotKind kind = plot_kind_from_string(m.kind);
  std::ifstream is(m.trajectory, std::ios::binary);
  if (!is) throw ParseError("cannot open '" + m.trajectory + "'");
  const CsvTable table = read_csv(is);

  std::optional<Eigen::VectorXd> caps;
  if (kind == PlotKind::kQueues) caps = plot_capacities(m);
  SvgOptions svg;
  svg.title = kind == PlotKind::kRates ? "Routing rates" : "Pool queues";
  svg.y_label = kind == PlotKind::kRates ? "x_ij" : "q_j";
  const std::string out = render_svg(extract_series(table, kind, caps), svg);

  if (m.out.empty()) {
    const std::string suffix = "_trajectory.csv";
    std::string stem = fs::path(m.trajectory).replace_extension().string();
    if (m.trajectory.size() > suffix.size() &&
        m.trajectory.ends_with(suffix))
      stem = m.trajectory.substr(0, m.trajectory.size() - suffix.size());
    m.out = stem + "_" + to_string(kind) + ".svg";
  }
  write_text_file(m.out, out);
  m.outputs = {m.out};
  write_manifest(fs::path(m.out).replace_extension().string() + "_manifest.json",
                 m);
  std::cout << "wrote " << m.out << "\n";
  return kOk;
}

int run_verify(RunManifest m, Fault fault) {
  const ScenarioD s = load_scenario(m.scenario);
  VerifyOptions opts;
  if (m.seed) opts.seed = *m.seed;
  opts.random_scenarios = m.random_scenarios.value_or(opts.random_scenarios);
  opts.fault = fault;
  const VerifyReport rep = run_verification(s, opts);
  const std::string text = verify_report_text(rep);
  std::cout << text;
  if (!m.out.empty()) {
    const std::string txt = output_path(m.out, "verify.txt");
    write_text_file(txt, text);
    m.outputs = {txt};
    write_manifest(output_path(m.out, "manifest.json"), m);
  }
  if (!rep.passed()) {
    for (const auto& name : rep.failing())
      std::cerr << "property failed: " << name << "\n";
    return kProperty;
  }
  return kOk;
}

int dispatch(const RunManifest& m, Fault fault) {
  if (m.subcommand == "feasibility") return run_feasibility(m);
  if (m.subcommand == "equilibrium") return run_equilibrium(m);
  if (m.subcommand == "simulate") return run_simulate(m);
  if (m.subcommand == "plot") return run_plot(m);
  if (m.subcommand == "verify") return run_verify(m, fault);
  throw ParseError("unknown subcommand '" + m.subcommand + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluid-model load balancing across server pools with setup "
               "delays"};
  app.set_version_flag("--version", std::string("fluidlb ") + tool_version());
  app.require_subcommand(1);

  RunManifest m;
  std::string policy = "myopic";
  double dt = 1e-3, horizon = 60.0;
  long stride = 1;
  bool shrunk = false;
  unsigned long long seed = 0;
  long verify_scenarios = 50;
  std::string fault_name;
  std::string manifest_path;

  auto* feas = app.add_subcommand("feasibility", "Check sum(r) <= sum(c)");
  feas->add_option("scenario", m.scenario, "Scenario file")->required();

  auto* eq = app.add_subcommand("equilibrium", "Solve for the equilibrium");
  eq->add_option("scenario", m.scenario, "Scenario file")->required();
  eq->add_option("--policy", policy, "myopic | proximal")
      ->check(CLI::IsMember({"myopic", "proximal"}));
  eq->add_flag("--shrunk", shrunk, "Use the shrunk capacities ctilde");
  eq->add_option("--out", m.out, "Output prefix");

  auto* sim = app.add_subcommand("simulate", "Integrate the fluid dynamics");
  sim->add_option("scenario", m.scenario, "Scenario file")->required();
  sim->add_option("--policy", policy, "myopic | proximal | myopic-delayed")
      ->check(CLI::IsMember({"myopic", "proximal", "myopic-delayed"}));
  sim->add_option("--dt", dt, "Step size")->capture_default_str();
  sim->add_option("--T", horizon, "Horizon")->capture_default_str();
  sim->add_option("--stride", stride, "Record every stride-th step")
      ->capture_default_str();
  auto* sim_seed = sim->add_option(
      "--seed", seed, "Start from a random state drawn with this seed");
  sim->add_option("--out", m.out, "Output prefix")->required();

  auto* plot = app.add_subcommand("plot", "Render a trajectory CSV as SVG");
  plot->add_option("trajectory", m.trajectory, "Trajectory CSV")->required();
  plot->add_option("--kind", m.kind, "rates | queues")
      ->required()
      ->check(CLI::IsMember({"rates", "queues"}));
  plot->add_option("--scenario", m.scenario,
                   "Scenario file for the capacity lines");
  plot->add_option("--out", m.out, "Output SVG path");

  auto* ver = app.add_subcommand("verify", "Run the property suite");
  ver->add_option("scenario", m.scenario, "Scenario file")->required();
  auto* ver_seed = ver->add_option("--seed", seed, "Random seed");
  ver->add_option("--scenarios", verify_scenarios,
                  "Number of random scenarios")
      ->capture_default_str();
  ver->add_option("--out", m.out, "Output prefix");
  ver->add_option("--inject-fault", fault_name)->group("");

  auto* replay = app.add_subcommand("replay", "Rerun from a manifest");
  replay->add_option("manifest", manifest_path, "Manifest JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (replay->parsed()) {
      const RunManifest r = manifest_from_json(read_text_file(manifest_path));
      return dispatch(r, Fault::kNone);
    }
    m.subcommand = app.get_subcommands().front()->get_name();
    if (eq->parsed() || sim->parsed()) m.policy = policy;
    if (eq->parsed()) m.shrunk = shrunk;
    if (sim->parsed()) {
      m.dt = dt;
      m.T = horizon;
      m.stride = stride;
      if (sim_seed->count()) m.seed = seed;
    }
    if (ver->parsed()) {
      if (ver_seed->count()) m.seed = seed;
      m.random_scenarios = verify_scenarios;
    }
    return dispatch(m, fault_from_string(fault_name));
  } catch (const StabilityError& e) {
    std::cerr << "error: " << e.what() << "\nsuggested dt: "
              << format_number(e.suggested_dt()) << "\n";
    return kStability;
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfeasible;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what()
              << " (residual " << format_number(e.residual()) << ")\n";
    return kSolver;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  }
}
