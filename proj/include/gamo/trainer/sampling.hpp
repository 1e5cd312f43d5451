#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "gamo/diffcore/tensor.hpp"

namespace gamo::train {

using diff::Tensor;
using Rng = std::mt19937_64;

// Minority label i < c-1 with probability (P_c - P_i) / sum_j (P_c - P_j).
// Throws DataError when every weight is zero (nothing to oversample).
std::vector<int> assign_fake_labels(std::span<const double> priors, std::size_t count, Rng& rng);

// Minority label i < c-1 with probability 1 / (c-1).
std::vector<int> assign_uniform_labels(std::size_t classes, std::size_t count, Rng& rng);

// `count` row ids drawn uniformly with replacement from 0..n-1.
std::vector<std::size_t> sample_rows(std::size_t n, std::size_t count, Rng& rng);

// count x dim standard normal draws.
Tensor sample_latent(std::size_t count, std::size_t dim, Rng& rng);

Tensor gather_rows(const Tensor& m, std::span<const std::size_t> rows);

}  // namespace gamo::train
