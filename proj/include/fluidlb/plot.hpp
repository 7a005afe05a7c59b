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

// SVG line charts of recorded trajectories.

#ifndef FLUIDLB_PLOT_HPP
#define FLUIDLB_PLOT_HPP

#include "fluidlb/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fluidlb {

enum class PlotKind { kRates, kQueues };

std::string to_string(PlotKind k);
PlotKind plot_kind_from_string(const std::string& name);

struct PlotSeries {
  std::string label;
  std::vector<double> t;
  std::vector<double> y;
  bool dashed = false;
};

// rates: x_i_j for every (i, j). queues: q_j, plus a dashed line at c_j for
// each pool when capacities are given. Throws ParseError on missing columns
// or an empty table.
std::vector<PlotSeries> extract_series(
    const CsvTable& table, PlotKind kind,
    const std::optional<Eigen::VectorXd>& capacities = {});

struct SvgOptions {
  int width = 800;
  int height = 500;
  std::size_t max_points = 2000;
  std::string title;
  std::string y_label;
};

std::string render_svg(const std::vector<PlotSeries>& series,
                       const SvgOptions& opts);

}  // namespace fluidlb

#endif  // FLUIDLB_PLOT_HPP
