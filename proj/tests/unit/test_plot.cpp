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

#include "helpers.hpp"

#include "fluidlb/plot.hpp"

#include <regex>
#include <sstream>

using namespace fluidlb;
using namespace fluidlb::test;

namespace {

CsvTable run_table(Policy p, double T) {
  const ScenarioD s = scen_a();
  IntegrateOptions opts;
  opts.T = T;
  opts.stride = 100;
  const Trajectory traj = integrate(p, zero_state(p, s), s, opts);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream is(os.str());
  return read_csv(is);
}

}  // namespace

TEST_CASE("rates plot has one labeled series per pair") {
  const CsvTable t = run_table(Policy::kMyopic, 60.0);
  const auto series = extract_series(t, PlotKind::kRates);
  REQUIRE(series.size() == 4);
  // Final ordering of the myopic rates: x11 > x22 > x12 > x21.
  CHECK(series[0].y.back() > series[3].y.back());
  CHECK(series[3].y.back() > series[1].y.back());
  CHECK(series[1].y.back() > series[2].y.back());

  const std::string svg = render_svg(series, {});
  CHECK(svg.rfind("<svg", 0) == 0);
  const std::regex lines("<polyline");
  CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), lines),
                      std::sregex_iterator()) == 4);
  for (const char* label : {"x_1_1", "x_1_2", "x_2_1", "x_2_2"})
    CHECK(svg.find(std::string("data-label=\"") + label + "\"") != std::string::npos);
}

TEST_CASE("queues plot adds dashed capacity lines") {
  const ScenarioD s = scen_a();
  const CsvTable my = run_table(Policy::kMyopic, 60.0);
  const auto series = extract_series(my, PlotKind::kQueues, s.c());
  REQUIRE(series.size() == 4);
  CHECK_FALSE(series[0].dashed);
  CHECK(series[2].dashed);
  CHECK(series[2].y.front() == 15.0);
  CHECK(series[0].y.back() > 15.0);

  const CsvTable px = run_table(Policy::kProximal, 200.0);
  CHECK(extract_series(px, PlotKind::kQueues, s.c())[0].y.back() < 15.0);

  const std::string svg = render_svg(series, {});
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(extract_series(my, PlotKind::kQueues).size() == 2);
}

TEST_CASE("long series are thinned") {
  PlotSeries big{"y", {}, {}, false};
  for (int k = 0; k < 100000; ++k) {
    big.t.push_back(k);
    big.y.push_back(k % 7);
  }
  SvgOptions opts;
  opts.max_points = 500;
  const std::string svg = render_svg({big}, opts);
  const auto start = svg.find("points=\"");
  const auto stop = svg.find('"', start + 8);
  const std::string pts = svg.substr(start + 8, stop - start - 8);
  const auto count = std::count(pts.begin(), pts.end(), ' ') + 1;
  CHECK(count <= 502);
  CHECK(count >= 400);
}

TEST_CASE("missing columns and empty tables") {
  CsvTable t;
  t.header = {"t", "q_1"};
  CHECK_THROWS_AS(extract_series(t, PlotKind::kQueues), ParseError);
  t.rows.push_back({0.0, 1.0});
  CHECK_NOTHROW(extract_series(t, PlotKind::kQueues));
  CHECK_THROWS_AS(extract_series(t, PlotKind::kRates), ParseError);
  t.header = {"time", "q_1"};
  CHECK_THROWS_AS(extract_series(t, PlotKind::kQueues), ParseError);
  CHECK_THROWS_AS(plot_kind_from_string("bars"), ValidationError);
}
