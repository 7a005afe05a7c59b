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

#include "fluidlb/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace fluidlb {

std::string to_string(PlotKind k) {
  return k == PlotKind::kRates ? "rates" : "queues";
}

PlotKind plot_kind_from_string(const std::string& name) {
  if (name == "rates") return PlotKind::kRates;
  if (name == "queues") return PlotKind::kQueues;
  throw ValidationError("unknown plot kind '" + name + "' (rates | queues)");
}

std::vector<PlotSeries> extract_series(
    const CsvTable& table, PlotKind kind,
    const std::optional<Eigen::VectorXd>& capacities) {
  if (table.rows.empty()) throw ParseError("trajectory CSV has no data rows");
  if (table.column("t") < 0) throw ParseError("missing column 't'");
  const auto [m, n] = trajectory_dimensions(table);
  if (n == 0) throw ParseError("missing column 'q_1'");
  if (kind == PlotKind::kRates && m == 0)
    throw ParseError("missing column 'x_1_1'");

  const std::vector<double> t = table.series("t");
  std::vector<PlotSeries> out;
  if (kind == PlotKind::kRates) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const std::string name =
            "x_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
        out.push_back({name, t, table.series(name), false});
      }
    return out;
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const std::string name = "q_" + std::to_string(j + 1);
    out.push_back({name, t, table.series(name), false});
  }
  if (capacities) {
    if (capacities->size() != n)
      throw ValidationError("capacity count does not match the trajectory");
    for (Eigen::Index j = 0; j < n; ++j)
      out.push_back({"c_" + std::to_string(j + 1),
                     {t.front(), t.back()},
                     {(*capacities)(j), (*capacities)(j)},
                     true});
  }
  return out;
}

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                "#bcbd22", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series,
                       const SvgOptions& opts) {
  double t0 = std::numeric_limits<double>::infinity();
  double t1 = -t0, y0 = t0, y1 = -t0;
  for (const auto& s : series)
    for (std::size_t k = 0; k < s.t.size(); ++k) {
      if (std::isnan(s.y[k])) continue;
      t0 = std::min(t0, s.t[k]);
      t1 = std::max(t1, s.t[k]);
      y0 = std::min(y0, s.y[k]);
      y1 = std::max(y1, s.y[k]);
    }
  if (!std::isfinite(t0)) throw ParseError("nothing to plot");
  y0 = std::min(y0, 0.0);
  if (t1 <= t0) t1 = t0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  y1 += 0.05 * (y1 - y0);

  const double left = 70, right = 130, top = 40, bottom = 50;
  const double pw = opts.width - left - right;
  const double ph = opts.height - top - bottom;
  auto px = [&](double t) { return left + (t - t0) / (t1 - t0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width
     << "\" height=\"" << opts.height << "\" viewBox=\"0 0 " << opts.width
     << " " << opts.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opts.title.empty())
    os << "<text x=\"" << opts.width / 2 << "\" y=\"24\" text-anchor=\"middle\""
       << " font-size=\"15\">" << escape(opts.title) << "</text>\n";

  os << "<g stroke=\"#ccc\" stroke-width=\"1\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double y = y0 + (y1 - y0) * k / 5.0;
    os << "<line x1=\"" << num(left) << "\" x2=\"" << num(left + pw)
       << "\" y1=\"" << num(py(y)) << "\" y2=\"" << num(py(y)) << "\"/>\n";
  }
  os << "</g>\n";
  os << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\""
     << num(pw) << "\" height=\"" << num(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double y = y0 + (y1 - y0) * k / 5.0;
    const double t = t0 + (t1 - t0) * k / 5.0;
    os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(y) + 4)
       << "\" text-anchor=\"end\">" << num(y) << "</text>\n";
    os << "<text x=\"" << num(px(t)) << "\" y=\"" << num(top + ph + 18)
       << "\" text-anchor=\"middle\">" << num(t) << "</text>\n";
  }
  os << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << opts.height - 10
     << "\" text-anchor=\"middle\">t</text>\n";
  if (!opts.y_label.empty())
    os << "<text transform=\"translate(18," << num(top + ph / 2)
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(opts.y_label)
       << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % std::size(kPalette)];
    const std::size_t count = ser.t.size();
    const std::size_t step =
        std::max<std::size_t>(1, (count + opts.max_points - 1) / opts.max_points);
    os << "<polyline class=\"series\" data-label=\"" << escape(ser.label)
       << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (ser.dashed) os << " stroke-dasharray=\"6,4\"";
    os << " points=\"";
    bool first = true;
    for (std::size_t k = 0; k < count; k += step) {
      if (std::isnan(ser.y[k])) continue;
      os << (first ? "" : " ") << num(px(ser.t[k])) << "," << num(py(ser.y[k]));
      first = false;
    }
    if (count > 0 && (count - 1) % step != 0 && !std::isnan(ser.y[count - 1]))
      os << " " << num(px(ser.t[count - 1])) << "," << num(py(ser.y[count - 1]));
    os << "\"/>\n";

    const double ly = top + 10 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << num(left + pw + 12) << "\" x2=\"" << num(left + pw + 36)
       << "\" y1=\"" << num(ly) << "\" y2=\"" << num(ly) << "\" stroke=\""
       << color << "\" stroke-width=\"2\"";
    if (ser.dashed) os << " stroke-dasharray=\"6,4\"";
    os << "/>\n<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(ly + 4)
       << "\">" << escape(ser.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace fluidlb
