#include "gamo/baselines/smote.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "gamo/diffcore/kernels.hpp"
#include "gamo/error.hpp"

namespace gamo::baselines {

namespace {

// k nearest other rows of every row of x.
std::vector<std::vector<std::size_t>> neighbours(const Tensor& x, std::size_t k) {
  const std::size_t n = x.rows();
  std::vector<double> dist(n * n);
  kernels::pairwise_sq_dist(n, n, x.cols(), x.values(), x.values(), dist);
  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> order(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    const double* d = dist.data() + r * n;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k + 1, n)), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        // the row itself sorts first even against duplicates
                        if ((a == r) != (b == r)) return a == r;
                        return d[a] != d[b] ? d[a] < d[b] : a < b;
                      });
    out[r].assign(order.begin() + 1, order.begin() + static_cast<std::ptrdiff_t>(k + 1));
  }
  return out;
}

}  // namespace

Tensor smote_class(const Tensor& x, std::size_t count, std::size_t k, std::mt19937_64& rng) {
  if (k < 1) throw ConfigError("SMOTE needs k >= 1");
  Tensor out = Tensor::matrix(count, x.cols());
  if (count == 0) return out;
  if (x.rows() <= k) {
    throw DataError("SMOTE: class has " + std::to_string(x.rows()) + " rows, needs more than k = " +
                    std::to_string(k));
  }
  const auto nn = neighbours(x, k);
  std::uniform_int_distribution<std::size_t> pick_row(0, x.rows() - 1);
  std::uniform_int_distribution<std::size_t> pick_nn(0, k - 1);
  std::uniform_real_distribution<double> lambda(0.0, 1.0);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t r = pick_row(rng);
    const std::size_t q = nn[r][pick_nn(rng)];
    const double l = lambda(rng);
    const auto a = x.row(r);
    const auto b = x.row(q);
    auto o = out.row(s);
    for (std::size_t j = 0; j < o.size(); ++j) o[j] = a[j] + l * (b[j] - a[j]);
  }
  return out;
}

Dataset append_synthetic(const Dataset& data, const std::vector<Tensor>& per_class) {
  if (per_class.size() > data.class_count()) throw ConfigError("more synthetic blocks than classes");
  std::size_t extra = 0;
  for (const auto& t : per_class) {
    if (t.rows() > 0 && t.cols() != data.dim()) throw ShapeError("synthetic rows have the wrong width");
    extra += t.rows();
  }
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  Tensor f = Tensor::matrix(n + extra, d);
  std::copy(data.features().values().begin(), data.features().values().end(), f.values().begin());
  std::vector<int> labels = data.labels();
  std::size_t row = n;
  for (std::size_t i = 0; i < per_class.size(); ++i) {
    std::copy(per_class[i].values().begin(), per_class[i].values().end(),
              f.values().begin() + static_cast<std::ptrdiff_t>(row * d));
    row += per_class[i].rows();
    labels.insert(labels.end(), per_class[i].rows(), static_cast<int>(i));
  }
  return Dataset::from_class_indices(std::move(f), std::move(labels), data.class_labels());
}

Dataset smote_oversample(const Dataset& data, const SmoteConfig& cfg, std::mt19937_64& rng) {
  const std::size_t c = data.class_count();
  std::vector<std::size_t> counts = cfg.counts;
  if (counts.empty()) {
    const std::size_t top = data.class_size(c - 1);
    for (std::size_t i = 0; i < c; ++i) counts.push_back(top - data.class_size(i));
  }
  if (counts.size() != c) throw ConfigError("SMOTE counts must list every class");

  std::vector<Tensor> synth;
  for (std::size_t i = 0; i < c; ++i) {
    synth.push_back(counts[i] ? smote_class(data.class_matrix(i), counts[i], cfg.k, rng)
                              : Tensor::matrix(0, data.dim()));
  }
  return append_synthetic(data, synth);
}

}  // namespace gamo::baselines
