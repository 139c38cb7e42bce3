#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bimanual {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart with axes, tick labels and a legend.
void write_svg_line_chart(const std::filesystem::path& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<PlotSeries>& series);

}  // namespace bimanual
