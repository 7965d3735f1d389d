#include "slimqfl/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace slimqfl {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

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

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

}  // namespace

std::string render_line_plot(const PlotSpec& spec,
                             const std::vector<PlotSeries>& series) {
  double x_min = std::numeric_limits<double>::infinity();
  double x_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
  }
  if (!(x_min <= x_max)) {
    x_min = 0.0;
    x_max = 1.0;
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  const double y_span = spec.y_max > spec.y_min ? spec.y_max - spec.y_min : 1.0;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) {
    const double c = std::clamp(y, spec.y_min, spec.y_min + y_span);
    return kTop + plot_h - (c - spec.y_min) / y_span * plot_h;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"24\" "
      << "text-anchor=\"middle\" font-size=\"14\">" << escape(spec.title)
      << "</text>\n";

  // Axes and ticks.
  svg << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\""
      << num(plot_w) << "\" height=\"" << num(plot_h)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = spec.y_min + y_span * i / 5.0;
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(y)) << "\" x2=\""
        << num(kLeft + plot_w) << "\" y2=\"" << num(py(y))
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(y) + 4)
        << "\" text-anchor=\"end\">" << tick_label(y) << "</text>\n";
    const double x = x_min + (x_max - x_min) * i / 5.0;
    svg << "<text x=\"" << num(px(x)) << "\" y=\""
        << num(kTop + plot_h + 16) << "\" text-anchor=\"middle\">"
        << tick_label(x) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\""
      << num(kHeight - 14) << "\" text-anchor=\"middle\">"
      << escape(spec.x_label) << "</text>\n";
  svg << "<text transform=\"translate(16 " << num(kTop + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(spec.y_label)
      << "</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t p = 0; p < series[i].points.size(); ++p) {
      if (p) svg << ' ';
      svg << num(px(series[i].points[p].first)) << ','
          << num(py(series[i].points[p].second));
    }
    svg << "\"/>\n";
    const double ly = kTop + 12 + 18.0 * static_cast<double>(i);
    const double lx = kLeft + plot_w + 12;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(lx + 20) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">"
        << escape(series[i].name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace slimqfl
