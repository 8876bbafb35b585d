#pragma once

#include <optional>
#include <string>
#include <vector>

namespace tvg::app {

struct LineSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Shaded region between two curves sharing x.
struct Band {
  std::string label;
  std::vector<double> x;
  std::vector<double> lo;
  std::vector<double> hi;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<LineSeries> lines;
  std::optional<Band> band;
};

/// Standalone SVG document: axes with ticks, polyline per series, legend.
/// Non-finite points break a polyline. Throws std::invalid_argument when there
/// is nothing to draw.
std::string render_svg(const Chart& chart);

}  // namespace tvg::app
