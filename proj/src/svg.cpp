// Copyright 2026 The tvobs Authors
//
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

#include "tvobs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tvobs {
namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 24.0;
constexpr double kTop = 42.0;
constexpr double kBottom = 52.0;
constexpr std::size_t kMaxPoints = 1500;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

struct Range {
  double lo;
  double hi;
};

// Collects the finite extent of the data; a missing or flat extent widens
// to +-1 around the value so axes always have area.
Range finite_range(const std::vector<const std::vector<double>*>& columns) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto* col : columns) {
    for (double v : *col) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) return {-1.0, 1.0};
  if (hi - lo < 1e-12) return {lo - 1.0, hi + 1.0};
  return {lo, hi};
}

// Tick step of the form {1,2,5}*10^e giving roughly six intervals.
double nice_step(double span) {
  double raw = span / 6.0;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double frac = raw / mag;
  double mult = 1.0;
  if (frac > 5.0)
    mult = 10.0;
  else if (frac > 2.0)
    mult = 5.0;
  else if (frac > 1.0)
    mult = 2.0;
  return mult * mag;
}

std::vector<double> tick_positions(const Range& r) {
  double step = nice_step(r.hi - r.lo);
  double first = std::ceil(r.lo / step - 1e-9) * step;
  std::vector<double> out;
  for (double v = first; v <= r.hi + step * 1e-9; v += step) {
    if (std::fabs(v) < step * 1e-9) v = 0.0;
    out.push_back(v);
  }
  return out;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

}  // namespace

void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<double>& x,
                     const std::vector<PlotSeries>& series) {
  std::vector<const std::vector<double>*> ycols;
  for (const auto& s : series) ycols.push_back(&s.y);
  Range xr = finite_range({&x});
  Range yr = finite_range(ycols);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto map_x = [&](double v) {
    return kLeft + (v - xr.lo) / (xr.hi - xr.lo) * plot_w;
  };
  auto map_y = [&](double v) {
    return kTop + plot_h - (v - yr.lo) / (yr.hi - yr.lo) * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"#ffffff\"/>\n";
  svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"monospace\" font-size=\"16\">" << escape_text(title)
      << "</text>\n";

  // Grid and ticks.
  for (double tx : tick_positions(xr)) {
    double px = map_x(tx);
    svg << "<line x1=\"" << coord(px) << "\" y1=\"" << kTop << "\" x2=\""
        << coord(px) << "\" y2=\"" << kTop + plot_h
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << coord(px) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"monospace\" "
        << "font-size=\"12\">" << tick_label(tx) << "</text>\n";
  }
  for (double ty : tick_positions(yr)) {
    double py = map_y(ty);
    svg << "<line x1=\"" << kLeft << "\" y1=\"" << coord(py) << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << coord(py)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << coord(py + 4)
        << "\" text-anchor=\"end\" font-family=\"monospace\" "
        << "font-size=\"12\">" << tick_label(ty) << "</text>\n";
  }

  // Frame.
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

  // Axis labels.
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
      << "font-size=\"14\">" << escape_text(x_label) << "</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"monospace\" "
      << "font-size=\"14\" transform=\"rotate(-90 18 " << kTop + plot_h / 2
      << ")\">" << escape_text(y_label) << "</text>\n";

  // Series polylines; non-finite samples split the line.
  std::size_t n = x.size();
  std::size_t stride = n > kMaxPoints ? (n + kMaxPoints - 1) / kMaxPoints : 1;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    std::string dash = s.dashed ? " stroke-dasharray=\"6,4\"" : "";
    std::string points;
    auto flush = [&]() {
      if (points.empty()) return;
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"" << dash << " points=\"" << points
          << "\"/>\n";
      points.clear();
    };
    std::size_t m = std::min(s.y.size(), n);
    for (std::size_t k = 0; k < m; k += stride) {
      double xv = x[k];
      double yv = s.y[k];
      if (!std::isfinite(xv) || !std::isfinite(yv)) {
        flush();
        continue;
      }
      if (!points.empty()) points += " ";
      points += coord(map_x(xv)) + "," + coord(map_y(yv));
    }
    // The final sample stays visible even when the stride skips it.
    if (m > 0 && stride > 1 && (m - 1) % stride != 0) {
      double xv = x[m - 1];
      double yv = s.y[m - 1];
      if (std::isfinite(xv) && std::isfinite(yv)) {
        if (!points.empty()) points += " ";
        points += coord(map_x(xv)) + "," + coord(map_y(yv));
      }
    }
    flush();
  }

  // Legend, top right inside the frame.
  double lx = kLeft + plot_w - 170;
  double ly = kTop + 14;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % kPaletteSize];
    std::string dash = s.dashed ? " stroke-dasharray=\"6,4\"" : "";
    svg << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly) << "\" x2=\""
        << coord(lx + 26) << "\" y2=\"" << coord(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"" << dash << "/>\n";
    svg << "<text x=\"" << coord(lx + 32) << "\" y=\"" << coord(ly + 4)
        << "\" font-family=\"monospace\" font-size=\"12\">"
        << escape_text(s.label) << "</text>\n";
    ly += 18;
  }

  svg << "</svg>\n";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << svg.str();
  if (!out) throw std::runtime_error("failed to write " + path);
}

}  // namespace tvobs
