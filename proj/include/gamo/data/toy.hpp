#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gamo/data/dataset.hpp"

namespace gamo::data {

struct GaussianComponent {
  std::vector<double> mean;
  std::vector<double> stddev;  // per dimension (diagonal covariance)
  double weight = 1.0;
};

// A class is a mixture of axis-aligned Gaussians; several components give
// non-convex classes.
struct ClassGeometry {
  std::vector<GaussianComponent> components;
};

// Geometry of a synthetic dataset; classes[k] is the class with source label k.
struct ToyGeometry {
  std::vector<ClassGeometry> classes;

  std::size_t dim() const;
  // Throws DataError on empty classes, ragged dimensions or a
  // non-positive standard deviation.
  void validate() const;
};

// Two 2-D unit Gaussians: label 0 at the origin, label 1 at (separation, 0).
ToyGeometry two_gaussians(double separation = 3.0);
// 2-D: label 0 is a central blob, label 1 a ring of `components` blobs.
ToyGeometry ring(std::size_t components = 8, double radius = 3.0);
// `classes` classes in `dim` dimensions, each a mixture of `per_class` blobs
// whose centres are drawn from a fixed layout seed.
ToyGeometry clusters(std::size_t classes = 10, std::size_t dim = 10, std::size_t per_class = 2,
                     double spread = 2.0, double stddev = 1.0, std::uint64_t layout_seed = 7);

ToyGeometry toy_preset(std::string_view name);

// Draws spec.counts[k] points for the class with source label k.
Dataset make_gaussian_toy(const ImbalanceSpec& spec, const ToyGeometry& geometry);

}  // namespace gamo::data
