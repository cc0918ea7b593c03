#pragma once

#include <optional>
#include <span>
#include <string>

#include "vrp/stats.hpp"

namespace vrp {

struct ScatterPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::span<const double> x;
  std::span<const double> y;
  std::optional<stats::FitBand> fit;  // line plus shaded band
  int width = 480;
  int height = 360;
};

// Self-contained SVG document. Output depends only on the inputs.
std::string render_scatter(const ScatterPlot& plot);

}  // namespace vrp
