#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "gamo/data/dataset.hpp"

namespace gamo::baselines {

using data::Dataset;
using diff::Tensor;

struct SmoteConfig {
  std::size_t k = 5;
  // Synthetic rows per class index; empty means n_{c-1} - n_i (balance).
  std::vector<std::size_t> counts;
};

// `count` points x + lambda (x' - x) with x a uniform row of X, x' one of its
// k nearest rows in X (Euclidean, ties by row id), lambda ~ U[0, 1].
// Throws DataError when X has k rows or fewer and count > 0.
Tensor smote_class(const Tensor& x, std::size_t count, std::size_t k, std::mt19937_64& rng);

// Originals followed by per_class[i] rows labelled i, in class order.
Dataset append_synthetic(const Dataset& data, const std::vector<Tensor>& per_class);

// Originals followed by the synthetic rows of each class in class order.
Dataset smote_oversample(const Dataset& data, const SmoteConfig& cfg, std::mt19937_64& rng);

}  // namespace gamo::baselines
