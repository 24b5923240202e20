#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "occ/csv.hpp"
#include "occ/metrics.hpp"

namespace occ {

/// Renders one box (min/q1/median/q3/max) per method for a metric as a
/// standalone SVG 1.1 document. Each box group carries data-* attributes
/// with the exact statistics so downstream checks can read them back.
inline std::string render_boxplot_svg(
    const std::vector<std::pair<std::string, SummaryStats>>& series,
    const std::string& metric) {
  if (series.empty()) throw std::invalid_argument("render_boxplot_svg: no series");

  const double width = 160.0 + 90.0 * static_cast<double>(series.size());
  const double height = 420.0;
  const double top = 40.0, bottom = height - 60.0, left = 70.0;

  double lo = series.front().second.min, hi = series.front().second.max;
  for (const auto& [name, s] : series) {
    lo = std::min(lo, s.min);
    hi = std::max(hi, s.max);
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto y_of = [&](double v) { return bottom - (v - lo) / (hi - lo) * (bottom - top); };
  auto fmt = [](double v, const char* spec = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return std::string(buf);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt(width) + "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) +
         " " + fmt(height) + "\">\n";
  svg += "<title>" + metric + "</title>\n";
  svg += "<text x=\"" + fmt(width / 2) + "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" + metric + "</text>\n";

  // y axis with 6 numeric ticks
  svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) +
         "\" y2=\"" + fmt(bottom) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = lo + (hi - lo) * t / 5.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + fmt(left - 5) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(left) +
           "\" y2=\"" + fmt(y) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(left - 9) + "\" y=\"" + fmt(y + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           fmt(v, "%.4g") + "</text>\n";
  }

  double x = left + 55.0;
  const double box_w = 44.0;
  for (const auto& [name, s] : series) {
    svg += "<g class=\"box\" data-method=\"" + name + "\" data-min=\"" + fmt(s.min, "%.17g") +
           "\" data-q1=\"" + fmt(s.q1, "%.17g") + "\" data-median=\"" +
           fmt(s.median, "%.17g") + "\" data-q3=\"" + fmt(s.q3, "%.17g") + "\" data-max=\"" +
           fmt(s.max, "%.17g") + "\">\n";
    svg += "  <line x1=\"" + fmt(x) + "\" y1=\"" + fmt(y_of(s.min)) + "\" x2=\"" + fmt(x) +
           "\" y2=\"" + fmt(y_of(s.max)) + "\" stroke=\"black\"/>\n";
    for (double whisk : {s.min, s.max})
      svg += "  <line x1=\"" + fmt(x - box_w / 4) + "\" y1=\"" + fmt(y_of(whisk)) +
             "\" x2=\"" + fmt(x + box_w / 4) + "\" y2=\"" + fmt(y_of(whisk)) +
             "\" stroke=\"black\"/>\n";
    svg += "  <rect x=\"" + fmt(x - box_w / 2) + "\" y=\"" + fmt(y_of(s.q3)) + "\" width=\"" +
           fmt(box_w) + "\" height=\"" + fmt(std::max(1e-9, y_of(s.q1) - y_of(s.q3))) +
           "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    svg += "  <line x1=\"" + fmt(x - box_w / 2) + "\" y1=\"" + fmt(y_of(s.median)) +
           "\" x2=\"" + fmt(x + box_w / 2) + "\" y2=\"" + fmt(y_of(s.median)) +
           "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    svg += "  <text x=\"" + fmt(x) + "\" y=\"" + fmt(bottom + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + name +
           "</text>\n";
    svg += "</g>\n";
    x += 90.0;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace occ
