#ifndef EDGEPOSE_PLOT_HPP
#define EDGEPOSE_PLOT_HPP

#include <string>
#include <utility>
#include <vector>

namespace edgepose {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

// Minimal deterministic SVG line chart; presentation only, the CSV is the
// normative output.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series);

}  // namespace edgepose

#endif
