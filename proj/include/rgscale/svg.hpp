// Copyright (c) 2026 The rgscale developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0.txt
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rgscale/common.hpp"

namespace rgscale {

// Deterministic SVG line charts: fixed canvas, fixed tick rules, fixed
// palette, no interactivity. Byte-identical output for identical input.

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_x = false;
  bool log_y = false;
};

namespace detail {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::vector<double> nice_ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = 10 * mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> ticks;
  double t = std::ceil(lo / step) * step;
  while (t <= hi + 1e-9 * step) {
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    t += step;
  }
  return ticks;
}

}  // namespace detail

inline std::string render_line_chart(std::vector<PlotSeries> series, const PlotOptions& opt = {}) {
  if (series.empty()) throw domain_error("empty series");
  for (auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) throw domain_error("empty series");
    if (opt.log_x || opt.log_y) {
      for (size_t i = 0; i < s.x.size(); ++i) {
        if (opt.log_x) {
          if (!(s.x[i] > 0)) throw domain_error("log axis requires positive values");
          s.x[i] = std::log10(s.x[i]);
        }
        if (opt.log_y) {
          if (!(s.y[i] > 0)) throw domain_error("log axis requires positive values");
          s.y[i] = std::log10(s.y[i]);
        }
      }
    }
  }
  constexpr int W = 800, H = 500, ML = 80, MR = 24, MT = 48, MB = 56;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  double x_lo = series[0].x[0], x_hi = x_lo, y_lo = series[0].y[0], y_hi = y_lo;
  for (const auto& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  if (x_hi == x_lo) {
    x_lo -= 1;
    x_hi += 1;
  }
  if (y_hi == y_lo) {
    y_lo -= 1;
    y_hi += 1;
  }
  const double x_pad = 0.04 * (x_hi - x_lo), y_pad = 0.06 * (y_hi - y_lo);
  x_lo -= x_pad;
  x_hi += x_pad;
  y_lo -= y_pad;
  y_hi += y_pad;
  auto px = [&](double x) { return ML + (x - x_lo) / (x_hi - x_lo) * (W - ML - MR); };
  auto py = [&](double y) { return H - MB - (y - y_lo) / (y_hi - y_lo) * (H - MT - MB); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";
  if (!opt.title.empty())
    svg += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"monospace\" "
           "font-size=\"16\">" + opt.title + "</text>\n";

  for (double t : detail::nice_ticks(x_lo + x_pad, x_hi - x_pad)) {
    const double x = px(t);
    svg += "<line x1=\"" + detail::fmt2(x) + "\" y1=\"" + detail::fmt2(H - MB) + "\" x2=\"" +
           detail::fmt2(x) + "\" y2=\"" + detail::fmt2(MT) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fmt2(x) + "\" y=\"" + detail::fmt2(H - MB + 18) +
           "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"11\">" +
           detail::fmt_tick(t) + "</text>\n";
  }
  for (double t : detail::nice_ticks(y_lo + y_pad, y_hi - y_pad)) {
    const double y = py(t);
    svg += "<line x1=\"" + detail::fmt2(ML) + "\" y1=\"" + detail::fmt2(y) + "\" x2=\"" +
           detail::fmt2(W - MR) + "\" y2=\"" + detail::fmt2(y) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg += "<text x=\"" + detail::fmt2(ML - 6) + "\" y=\"" + detail::fmt2(y + 4) +
           "\" text-anchor=\"end\" font-family=\"monospace\" font-size=\"11\">" +
           detail::fmt_tick(t) + "</text>\n";
  }
  svg += "<rect x=\"" + detail::fmt2(ML) + "\" y=\"" + detail::fmt2(MT) + "\" width=\"" +
         detail::fmt2(W - ML - MR) + "\" height=\"" + detail::fmt2(H - MT - MB) +
         "\" fill=\"none\" stroke=\"#303030\" stroke-width=\"1\"/>\n";

  const std::string xl = opt.x_label + (opt.log_x ? " [log10]" : "");
  const std::string yl = opt.y_label + (opt.log_y ? " [log10]" : "");
  svg += "<text x=\"" + detail::fmt2((ML + W - MR) / 2.0) + "\" y=\"" + detail::fmt2(H - 14) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\">" + xl +
         "</text>\n";
  svg += "<text x=\"20\" y=\"" + detail::fmt2((MT + H - MB) / 2.0) +
         "\" text-anchor=\"middle\" font-family=\"monospace\" font-size=\"13\" transform=\"rotate(-90 "
         "20 " + detail::fmt2((MT + H - MB) / 2.0) + ")\">" + yl + "</text>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = palette[k % 8];
    std::string pts;
    for (size_t i = 0; i < series[k].x.size(); ++i) {
      pts += detail::fmt2(px(series[k].x[i])) + "," + detail::fmt2(py(series[k].y[i]));
      if (i + 1 < series[k].x.size()) pts.push_back(' ');
    }
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    for (size_t i = 0; i < series[k].x.size(); ++i)
      svg += "<circle cx=\"" + detail::fmt2(px(series[k].x[i])) + "\" cy=\"" +
             detail::fmt2(py(series[k].y[i])) + "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
  }
  // legend, top right inside the frame
  for (size_t k = 0; k < series.size(); ++k) {
    const double ly = MT + 16 + 18.0 * k;
    svg += "<line x1=\"" + detail::fmt2(W - MR - 150) + "\" y1=\"" + detail::fmt2(ly - 4) +
           "\" x2=\"" + detail::fmt2(W - MR - 126) + "\" y2=\"" + detail::fmt2(ly - 4) +
           "\" stroke=\"" + palette[k % 8] + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::fmt2(W - MR - 120) + "\" y=\"" + detail::fmt2(ly) +
           "\" font-family=\"monospace\" font-size=\"12\">" + series[k].label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace rgscale
