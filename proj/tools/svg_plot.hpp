#pragma once

// Minimal line-plot writer: one panel, shared x axis, any number of series.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hardy::plot {

struct Series {
  std::string label;
  std::vector<double> y;
};

namespace detail {

inline std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

inline const char* colour(std::size_t i) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return palette[i % 6];
}

}  // namespace detail

/// Writes an SVG line plot. Non-finite samples break the polyline.
inline void write_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::vector<double>& x, const std::vector<Series>& series) {
  constexpr double W = 640, H = 400, left = 70, right = 160, top = 40, bottom = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (double v : x) {
    x0 = std::min(x0, v);
    x1 = std::max(x1, v);
  }
  for (const auto& s : series)
    for (double v : s.y)
      if (std::isfinite(v)) {
        y0 = std::min(y0, v);
        y1 = std::max(y1, v);
      }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };

  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << detail::fmt("%.1f", px(xv)) << "\" y=\"" << H - bottom + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::fmt("%.3g", xv) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << detail::fmt("%.1f", py(yv) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << detail::fmt("%.3g", yv) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << xlabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::string d;
    bool pen = false;
    for (std::size_t i = 0; i < x.size() && i < series[s].y.size(); ++i) {
      const double v = series[s].y[i];
      if (!std::isfinite(v)) {
        pen = false;
        continue;
      }
      d += pen ? " L" : " M";
      d += detail::fmt("%.2f", px(x[i])) + "," + detail::fmt("%.2f", py(v));
      pen = true;
    }
    os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << detail::colour(s) << "\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << W - right + 10 << "\" y=\"" << top + 16 + 18 * s << "\" font-size=\"12\" fill=\""
       << detail::colour(s) << "\">" << series[s].label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace hardy::plot
