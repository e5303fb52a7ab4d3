#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

namespace lipsyn::cli {

struct LinePlot {
  std::string title;
  std::string y_label;
  Eigen::VectorXd values;  // one sample per k
  std::optional<double> reference;
};

/// Static SVG line chart of values against k. Long series are reduced to
/// per-pixel min/max pairs so the envelope survives.
std::string render_svg(const LinePlot& plot, int width = 800, int height = 400);
void write_svg(const LinePlot& plot, const std::string& path);

}  // namespace lipsyn::cli
