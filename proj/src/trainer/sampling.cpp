#include "gamo/trainer/sampling.hpp"

#include <algorithm>
#include <string>

#include "gamo/error.hpp"

namespace gamo::train {

std::vector<int> assign_fake_labels(std::span<const double> priors, std::size_t count, Rng& rng) {
  if (priors.size() < 2) throw ConfigError("fake labels need at least two classes");
  const double pc = priors.back();
  std::vector<double> weights;
  bool any = false;
  for (std::size_t i = 0; i + 1 < priors.size(); ++i) {
    const double w = std::max(0.0, pc - priors[i]);
    any = any || w > 0.0;
    weights.push_back(w);
  }
  if (!any) throw DataError("nothing to oversample: all classes are balanced");
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<int> out(count);
  for (auto& l : out) l = pick(rng);
  return out;
}

std::vector<int> assign_uniform_labels(std::size_t classes, std::size_t count, Rng& rng) {
  if (classes < 2) throw ConfigError("uniform labels need at least two classes");
  std::uniform_int_distribution<int> pick(0, static_cast<int>(classes) - 2);
  std::vector<int> out(count);
  for (auto& l : out) l = pick(rng);
  return out;
}

std::vector<std::size_t> sample_rows(std::size_t n, std::size_t count, Rng& rng) {
  if (n == 0) throw DataError("cannot sample from an empty set");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> out(count);
  for (auto& r : out) r = pick(rng);
  return out;
}

Tensor sample_latent(std::size_t count, std::size_t dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor z = Tensor::matrix(count, dim);
  for (auto& v : z.values()) v = normal(rng);
  return z;
}

Tensor gather_rows(const Tensor& m, std::span<const std::size_t> rows) {
  Tensor out = Tensor::matrix(rows.size(), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= m.rows()) throw ShapeError("row " + std::to_string(rows[k]) + " out of range");
    std::copy_n(m.row(rows[k]).begin(), m.cols(), out.row(k).begin());
  }
  return out;
}

}  // namespace gamo::train
