#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace biflex {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y) in data units
};

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

}  // namespace detail

// Minimal deterministic line plot: axes, ticks, polylines, an optional
// horizontal limit line. CSV stays the canonical output; this is a viewing
// convenience.
inline std::string line_plot_svg(const std::string& title, const std::string& x_label,
                                 const std::string& y_label, const std::vector<PlotSeries>& series,
                                 std::optional<double> limit_line = std::nullopt) {
  const double width = 720, height = 480;
  const double ml = 70, mr = 20, mt = 36, mb = 52;
  const char* colors[] = {"#1f6fb2", "#c23b22", "#3a8f3a", "#8a52a0", "#b8860b"};

  double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        y_min = y_max = y;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (limit_line) {
    y_min = std::min(y_min, *limit_line);
    y_max = std::max(y_max, *limit_line);
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
         "viewBox=\"0 0 720 480\">\n";
  out += "<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
  out += "<text x=\"360\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + title + "</text>\n";

  // axes
  out += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(mt) + "\" x2=\"" +
         detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(height - mb) +
         "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(height - mb) +
         "\" x2=\"" + detail::svg_num(width - mr) + "\" y2=\"" + detail::svg_num(height - mb) +
         "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 5.0;
    const double yv = y_min + (y_max - y_min) * i / 5.0;
    out += "<line x1=\"" + detail::svg_num(px(xv)) + "\" y1=\"" + detail::svg_num(height - mb) +
           "\" x2=\"" + detail::svg_num(px(xv)) + "\" y2=\"" + detail::svg_num(height - mb + 5) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::svg_num(px(xv)) + "\" y=\"" + detail::svg_num(height - mb + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::tick_label(xv) + "</text>\n";
    out += "<line x1=\"" + detail::svg_num(ml - 5) + "\" y1=\"" + detail::svg_num(py(yv)) +
           "\" x2=\"" + detail::svg_num(ml) + "\" y2=\"" + detail::svg_num(py(yv)) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + detail::svg_num(ml - 8) + "\" y=\"" + detail::svg_num(py(yv) + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           detail::tick_label(yv) + "</text>\n";
  }
  out += "<text x=\"" + detail::svg_num((ml + width - mr) / 2) + "\" y=\"" +
         detail::svg_num(height - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + x_label +
         "</text>\n";
  out += "<text x=\"16\" y=\"" + detail::svg_num((mt + height - mb) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 " +
         detail::svg_num((mt + height - mb) / 2) + ")\">" + y_label + "</text>\n";

  if (limit_line) {
    out += "<line x1=\"" + detail::svg_num(ml) + "\" y1=\"" + detail::svg_num(py(*limit_line)) +
           "\" x2=\"" + detail::svg_num(width - mr) + "\" y2=\"" +
           detail::svg_num(py(*limit_line)) +
           "\" stroke=\"#c23b22\" stroke-dasharray=\"6,4\"/>\n";
  }

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = colors[i % 5];
    std::string pts;
    for (const auto& [x, y] : series[i].points) {
      pts += detail::svg_num(px(x)) + "," + detail::svg_num(py(y)) + " ";
    }
    out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + detail::svg_num(width - mr - 8) + "\" y=\"" +
           detail::svg_num(mt + 16.0 * (i + 1)) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + color +
           "\">" + series[i].label + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace biflex
