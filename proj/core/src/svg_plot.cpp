// SPDX-License-Identifier: Apache-2.0
#include "sparls/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace sparls::plot {

namespace {

constexpr int kWidth = 860;
constexpr int kHeight = 520;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Round-ish tick spacing covering [lo, hi] with about `count` ticks.
std::vector<double> ticks(double lo, double hi, int count) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
    out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return out;
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : series) {
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!std::isfinite(x_lo) || !std::isfinite(y_lo))
    throw std::invalid_argument("write_line_chart: no finite data");
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  const double y_pad = 0.05 * (y_hi - y_lo);
  y_lo -= y_pad;
  y_hi += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_line_chart: cannot open " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  // Axes, grid and tick labels.
  for (double tx : ticks(x_lo, x_hi, 8)) {
    out << "<line x1=\"" << num(sx(tx)) << "\" y1=\"" << num(sy(y_lo)) << "\" x2=\""
        << num(sx(tx)) << "\" y2=\"" << num(sy(y_hi))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(sx(tx)) << "\" y=\"" << num(sy(y_lo) + 18)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(tx) << "</text>\n";
  }
  for (double ty : ticks(y_lo, y_hi, 8)) {
    out << "<line x1=\"" << num(sx(x_lo)) << "\" y1=\"" << num(sy(ty)) << "\" x2=\""
        << num(sx(x_hi)) << "\" y2=\"" << num(sy(ty))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << num(sx(x_lo) - 8) << "\" y=\"" << num(sy(ty) + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << tick_label(ty) << "</text>\n";
  }
  out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kHeight / 2 << ")\">" << y_label << "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    bool open = false;
    auto flush = [&]() {
      if (open && !points.empty())
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"" << points << "\"/>\n";
      points.clear();
      open = false;
    };
    for (size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      points += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
      open = true;
    }
    flush();
    if (!s.label.empty()) {
      const double ly = kMarginTop + 16.0 + 18.0 * static_cast<double>(si);
      out << "<line x1=\"" << kWidth - kMarginRight + 12 << "\" y1=\"" << num(ly - 4)
          << "\" x2=\"" << kWidth - kMarginRight + 36 << "\" y2=\"" << num(ly - 4)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << kWidth - kMarginRight + 42 << "\" y=\"" << num(ly)
          << "\" font-size=\"12\">" << s.label << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace sparls::plot
