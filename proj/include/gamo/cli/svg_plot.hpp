#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gamo/diffcore/tensor.hpp"
#include "gamo/model/gamo_model.hpp"

namespace gamo::cli {

struct PlotBounds {
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
};

// Box around every row of the 2-column matrices, widened by `pad` of the
// span on each side.
PlotBounds bounds_of(std::span<const diff::Tensor* const> sets, double pad = 0.1);

// Centre of cell (row, col) of an n x n grid; row 0 is the top edge.
std::array<double, 2> grid_point(const PlotBounds& b, std::size_t n, std::size_t row, std::size_t col);

// Predicted class index of every cell, row-major.
std::vector<int> decision_grid(const model::GamoModel& m, const PlotBounds& b, std::size_t n = 200);

struct ScatterPlot {
  std::string title;
  PlotBounds bounds;
  std::size_t grid = 200;
  std::vector<int> regions;
  std::size_t classes = 2;
  diff::Tensor real;
  std::vector<int> real_labels;  // class indices; c-1 is the majority
  diff::Tensor synthetic;
  std::vector<int> synthetic_labels;
};

void write_svg(std::ostream& out, const ScatterPlot& plot);

}  // namespace gamo::cli
