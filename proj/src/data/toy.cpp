#include "gamo/data/toy.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gamo/error.hpp"

namespace gamo::data {

std::size_t ToyGeometry::dim() const {
  if (classes.empty() || classes.front().components.empty()) return 0;
  return classes.front().components.front().mean.size();
}

void ToyGeometry::validate() const {
  if (classes.size() < 2) throw DataError("toy geometry needs at least two classes");
  const std::size_t d = dim();
  if (d == 0) throw DataError("toy geometry has zero dimensions");
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (classes[k].components.empty()) throw DataError("toy class " + std::to_string(k) + " has no components");
    for (const auto& comp : classes[k].components) {
      if (comp.mean.size() != d || comp.stddev.size() != d) {
        throw DataError("toy class " + std::to_string(k) + ": component dimension mismatch");
      }
      for (double s : comp.stddev) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          throw DataError("toy class " + std::to_string(k) + ": degenerate covariance (stddev " + std::to_string(s) +
                          ")");
        }
      }
      if (!(comp.weight > 0.0)) throw DataError("toy class " + std::to_string(k) + ": component weight must be > 0");
    }
  }
}

ToyGeometry two_gaussians(double separation) {
  ToyGeometry g;
  g.classes.push_back({{{{0.0, 0.0}, {1.0, 1.0}, 1.0}}});
  g.classes.push_back({{{{separation, 0.0}, {1.0, 1.0}, 1.0}}});
  return g;
}

ToyGeometry ring(std::size_t components, double radius) {
  ToyGeometry g;
  g.classes.push_back({{{{0.0, 0.0}, {1.0, 1.0}, 1.0}}});
  ClassGeometry ring_class;
  for (std::size_t k = 0; k < components; ++k) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(components);
    ring_class.components.push_back({{radius * std::cos(a), radius * std::sin(a)}, {0.5, 0.5}, 1.0});
  }
  g.classes.push_back(std::move(ring_class));
  return g;
}

ToyGeometry clusters(std::size_t classes, std::size_t dim, std::size_t per_class, double spread, double stddev,
                     std::uint64_t layout_seed) {
  std::mt19937_64 rng(layout_seed);
  std::normal_distribution<double> normal(0.0, spread);
  ToyGeometry g;
  for (std::size_t k = 0; k < classes; ++k) {
    ClassGeometry cls;
    for (std::size_t p = 0; p < per_class; ++p) {
      GaussianComponent comp;
      for (std::size_t j = 0; j < dim; ++j) comp.mean.push_back(normal(rng));
      comp.stddev.assign(dim, stddev);
      cls.components.push_back(std::move(comp));
    }
    g.classes.push_back(std::move(cls));
  }
  return g;
}

ToyGeometry toy_preset(std::string_view name) {
  if (name == "two_gaussians") return two_gaussians();
  if (name == "ring") return ring();
  if (name == "clusters10") return clusters();
  throw ConfigError("unknown toy preset '" + std::string(name) + "' (known: two_gaussians, ring, clusters10)");
}

Dataset make_gaussian_toy(const ImbalanceSpec& spec, const ToyGeometry& geometry) {
  geometry.validate();
  if (spec.counts.size() != geometry.classes.size()) {
    throw DataError("toy geometry has " + std::to_string(geometry.classes.size()) + " classes but " +
                    std::to_string(spec.counts.size()) + " counts were given");
  }
  const std::size_t d = geometry.dim();
  std::size_t n = 0;
  for (auto c : spec.counts) {
    if (c == 0) throw DataError("toy class counts must be positive");
    n += c;
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor features = Tensor::matrix(n, d);
  std::vector<int> labels;
  labels.reserve(n);
  std::size_t row = 0;
  for (std::size_t k = 0; k < spec.counts.size(); ++k) {
    const auto& comps = geometry.classes[k].components;
    std::vector<double> weights;
    for (const auto& c : comps) weights.push_back(c.weight);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    for (std::size_t s = 0; s < spec.counts[k]; ++s, ++row) {
      const auto& comp = comps[comps.size() == 1 ? 0 : pick(rng)];
      for (std::size_t j = 0; j < d; ++j) features(row, j) = comp.mean[j] + comp.stddev[j] * normal(rng);
      labels.push_back(static_cast<int>(k));
    }
  }
  return Dataset::from_source_labels(std::move(features), labels);
}

}  // namespace gamo::data
