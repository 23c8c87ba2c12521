// Copyright 2026 The latentreg Authors.
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

// Minimal SVG line plots for distribution panels. Output depends only on
// the data: fixed 480x320 viewBox, fixed margins, coordinates printed with
// two decimals, no timestamps or ids.

#ifndef LATENTREG_SVG_HPP_
#define LATENTREG_SVG_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace latentreg::svg {

struct Polyline {
  std::vector<double> x;
  std::vector<double> y;
  std::string stroke = "#1f77b4";
  double width = 1.0;
  double opacity = 0.6;
};

struct Tick {
  double at;
  std::string label;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label = "CDF";
  std::vector<Tick> x_ticks;  // data coordinates
  std::vector<Polyline> lines;
};

inline constexpr double kWidth = 480.0;
inline constexpr double kHeight = 320.0;
inline constexpr double kLeft = 56.0;
inline constexpr double kRight = 16.0;
inline constexpr double kTop = 28.0;
inline constexpr double kBottom = 48.0;
inline constexpr std::size_t kMaxPoints = 400;

inline std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Empirical CDF through (v_(i), (i + 0.5) / n), thinned to at most
/// kMaxPoints evenly spaced ranks (first and last kept).
inline Polyline edf_polyline(const std::vector<double>& sorted_values, std::string stroke,
                             double width = 1.0, double opacity = 0.6) {
  Polyline p;
  p.stroke = std::move(stroke);
  p.width = width;
  p.opacity = opacity;
  const std::size_t n = sorted_values.size();
  if (n == 0) return p;
  const std::size_t m = std::min(n, kMaxPoints);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = m == 1 ? 0 : (k * (n - 1)) / (m - 1);
    p.x.push_back(sorted_values[i]);
    p.y.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return p;
}

/// A CDF sampled at `samples` evenly spaced points on [lo, hi].
inline Polyline cdf_polyline(const std::function<double(double)>& cdf, double lo, double hi,
                             std::size_t samples = 200) {
  Polyline p;
  p.stroke = "#000000";
  p.width = 2.0;
  p.opacity = 1.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(samples - 1);
    const double x = lo + t * (hi - lo);
    p.x.push_back(x);
    p.y.push_back(cdf(x));
  }
  return p;
}

/// Ticks at the 10%, ..., 90% quantiles of the target.
inline std::vector<Tick> decile_ticks(const std::function<double(double)>& inv_cdf) {
  std::vector<Tick> t;
  for (int k = 1; k <= 9; ++k) {
    const double v = inv_cdf(k / 10.0);
    t.push_back({v, short_number(v)});
  }
  return t;
}

inline void render(std::ostream& os, const Panel& panel) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& l : panel.lines)
    for (double v : l.x) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  for (const auto& t : panel.x_ticks) {
    lo = std::min(lo, t.at);
    hi = std::max(hi, t.at);
  }
  if (!std::isfinite(lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double v) { return kLeft + (v - lo) / (hi - lo) * pw; };
  auto sy = [&](double v) { return kTop + (1.0 - std::clamp(v, 0.0, 1.0)) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
     << "\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" fill=\"#ffffff\"/>\n";
  os << "<text x=\"" << fixed2(kWidth / 2) << "\" y=\"18\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"13\">" << escape(panel.title) << "</text>\n";
  os << "<rect x=\"" << fixed2(kLeft) << "\" y=\"" << fixed2(kTop) << "\" width=\"" << fixed2(pw)
     << "\" height=\"" << fixed2(ph) << "\" fill=\"none\" stroke=\"#444444\"/>\n";

  for (const auto& t : panel.x_ticks) {
    const std::string x = fixed2(sx(t.at));
    os << "<line x1=\"" << x << "\" y1=\"" << fixed2(kTop) << "\" x2=\"" << x << "\" y2=\""
       << fixed2(kTop + ph) << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << fixed2(kTop + ph + 14)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">"
       << escape(t.label) << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = k / 4.0;
    os << "<text x=\"" << fixed2(kLeft - 4) << "\" y=\"" << fixed2(sy(v) + 3)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" << fixed2(v)
       << "</text>\n";
  }
  os << "<text x=\"" << fixed2(kLeft + pw / 2) << "\" y=\"" << fixed2(kHeight - 8)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
     << escape(panel.x_label) << "</text>\n";
  os << "<text x=\"14\" y=\"" << fixed2(kTop + ph / 2) << "\" text-anchor=\"middle\" "
     << "font-family=\"sans-serif\" font-size=\"11\" transform=\"rotate(-90 14 "
     << fixed2(kTop + ph / 2) << ")\">" << escape(panel.y_label) << "</text>\n";

  for (const auto& l : panel.lines) {
    if (l.x.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << l.stroke << "\" stroke-width=\"" << fixed2(l.width)
       << "\" stroke-opacity=\"" << fixed2(l.opacity) << "\" points=\"";
    for (std::size_t i = 0; i < l.x.size(); ++i) {
      if (i) os << ' ';
      os << fixed2(sx(l.x[i])) << ',' << fixed2(sy(l.y[i]));
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
}

}  // namespace latentreg::svg

#endif  // LATENTREG_SVG_HPP_
