#include "edgepose/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace edgepose {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series) {
  constexpr double kW = 720.0, kH = 480.0;
  constexpr double kL = 70.0, kR = 20.0, kT = 40.0, kB = 50.0;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!(x_min <= x_max)) {
    x_min = 0.0;
    x_max = 1.0;
    y_min = 0.0;
    y_max = 1.0;
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;

  const auto sx = [&](double x) {
    return kL + (x - x_min) / (x_max - x_min) * (kW - kL - kR);
  };
  const auto sy = [&](double y) {
    return kH - kB - (y - y_min) / (y_max - y_min) * (kH - kT - kB);
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("plot: cannot write " + path);
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kW) << "\" height=\""
      << num(kH) << "\" viewBox=\"0 0 " << num(kW) << " " << num(kH) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kW / 2) << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  out << "<line x1=\"" << num(kL) << "\" y1=\"" << num(kH - kB) << "\" x2=\"" << num(kW - kR)
      << "\" y2=\"" << num(kH - kB) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << num(kL) << "\" y1=\"" << num(kT) << "\" x2=\"" << num(kL)
      << "\" y2=\"" << num(kH - kB) << "\" stroke=\"black\"/>\n";
  // Four ticks per axis.
  for (int k = 0; k <= 4; ++k) {
    const double fx = x_min + (x_max - x_min) * k / 4.0;
    const double fy = y_min + (y_max - y_min) * k / 4.0;
    out << "<text x=\"" << num(sx(fx)) << "\" y=\"" << num(kH - kB + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(fx)
        << "</text>\n";
    out << "<text x=\"" << num(kL - 8) << "\" y=\"" << num(sy(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << num((kL + kW - kR) / 2) << "\" y=\"" << num(kH - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << num((kT + kH - kB) / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 " << num((kT + kH - kB) / 2) << ")\">" << y_label
      << "</text>\n";

  double legend_y = kT + 6.0;
  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!first) out << " ";
      out << num(sx(x)) << "," << num(sy(y));
      first = false;
    }
    out << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      out << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y))
          << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
    out << "<rect x=\"" << num(kW - kR - 150) << "\" y=\"" << num(legend_y)
        << "\" width=\"12\" height=\"3\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << num(kW - kR - 132) << "\" y=\"" << num(legend_y + 5)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    legend_y += 18.0;
  }
  out << "</svg>\n";
}

}  // namespace edgepose
