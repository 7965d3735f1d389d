#pragma once

#include <string>
#include <utility>
#include <vector>

namespace slimqfl {

struct PlotSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double y_min = 0.0;
  double y_max = 1.0;
};

/// Self-contained SVG line chart: one polyline per series with a legend,
/// axis labels and tick marks. Output depends only on the inputs.
std::string render_line_plot(const PlotSpec& spec,
                             const std::vector<PlotSeries>& series);

}  // namespace slimqfl
