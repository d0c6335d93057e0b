#pragma once

#include <string>
#include <vector>

namespace phm::cli {

struct Curve {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Curve> curves;
  std::vector<double> markers;  // x positions of vertical crossing markers
  int width = 640;
  int height = 420;
};

/// Renders a line plot as a standalone SVG document. Output depends only on
/// the input values, so identical data gives identical bytes.
std::string render_svg(const PlotSpec& spec);

/// Roughly `target` evenly spaced round tick values covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 5);

}  // namespace phm::cli
