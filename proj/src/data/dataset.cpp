#include "gamo/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "gamo/error.hpp"

namespace gamo::data {

Dataset Dataset::from_source_labels(Tensor features, std::span<const int> source_labels) {
  std::map<int, std::size_t> counts;
  for (int l : source_labels) ++counts[l];
  std::vector<std::pair<std::size_t, int>> order;  // (size, source label)
  for (const auto& [label, n] : counts) order.emplace_back(n, label);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<int> class_labels;
  for (const auto& [n, label] : order) class_labels.push_back(label);
  return with_class_labels(std::move(features), source_labels, std::move(class_labels));
}

Dataset Dataset::with_class_labels(Tensor features, std::span<const int> source_labels,
                                   std::vector<int> class_labels) {
  std::map<int, int> to_index;
  for (std::size_t i = 0; i < class_labels.size(); ++i) {
    if (!to_index.emplace(class_labels[i], static_cast<int>(i)).second) {
      throw DataError("duplicate source label " + std::to_string(class_labels[i]) + " in class mapping");
    }
  }
  std::vector<int> labels(source_labels.size());
  for (std::size_t r = 0; r < source_labels.size(); ++r) {
    auto it = to_index.find(source_labels[r]);
    if (it == to_index.end()) {
      throw DataError("row " + std::to_string(r) + " has label " + std::to_string(source_labels[r]) +
                      " outside the class mapping");
    }
    labels[r] = it->second;
  }
  return from_class_indices(std::move(features), std::move(labels), std::move(class_labels));
}

Dataset Dataset::from_class_indices(Tensor features, std::vector<int> labels, std::vector<int> class_labels) {
  Dataset d;
  if (features.rank() == 1 && labels.empty()) features = Tensor::matrix(0, features.size());
  if (features.rank() != 2) throw ShapeError("features must be an n x D matrix");
  d.features_ = std::move(features);
  d.labels_ = std::move(labels);
  d.class_labels_ = std::move(class_labels);
  d.index();
  d.validate();
  return d;
}

void Dataset::index() {
  class_index_.assign(class_labels_.size(), {});
  for (std::size_t r = 0; r < labels_.size(); ++r) {
    const int l = labels_[r];
    if (l < 0 || static_cast<std::size_t>(l) >= class_labels_.size()) {
      throw DataError("row " + std::to_string(r) + " has class index " + std::to_string(l) + " out of range");
    }
    class_index_[static_cast<std::size_t>(l)].push_back(r);
  }
  priors_.assign(class_labels_.size(), 0.0);
  const auto n = static_cast<double>(labels_.size());
  if (n > 0)
    for (std::size_t i = 0; i < class_index_.size(); ++i)
      priors_[i] = static_cast<double>(class_index_[i].size()) / n;
}

void Dataset::validate() const {
  if (features_.rows() != labels_.size()) {
    throw DataError(std::to_string(features_.rows()) + " feature rows but " + std::to_string(labels_.size()) +
                    " labels");
  }
  if (!features_.all_finite()) throw DataError("features contain NaN or Inf");
  std::vector<char> seen(labels_.size(), 0);
  for (const auto& rows : class_index_) {
    for (auto r : rows) {
      if (r >= labels_.size() || seen[r]) throw DataError("class index sets do not partition the rows");
      seen[r] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) throw DataError("rows missing from class index");
  if (!labels_.empty()) {
    const double total = std::accumulate(priors_.begin(), priors_.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-12) throw DataError("priors do not sum to 1");
  }
}

void Dataset::require_size_order() const {
  for (std::size_t i = 1; i < class_index_.size(); ++i) {
    if (class_index_[i - 1].size() > class_index_[i].size()) {
      throw DataError("class sizes must be nondecreasing in class index (class " + std::to_string(i - 1) + " has " +
                      std::to_string(class_index_[i - 1].size()) + " rows, class " + std::to_string(i) + " has " +
                      std::to_string(class_index_[i].size()) + ")");
    }
  }
}

std::vector<std::size_t> Dataset::class_sizes() const {
  std::vector<std::size_t> s;
  for (const auto& rows : class_index_) s.push_back(rows.size());
  return s;
}

double Dataset::imbalance_ratio() const {
  const auto s = class_sizes();
  if (s.empty() || s.front() == 0) throw DataError("imbalance ratio undefined with an empty class");
  return static_cast<double>(s.back()) / static_cast<double>(s.front());
}

Tensor Dataset::class_matrix(std::size_t i) const {
  const auto& rows = class_index_.at(i);
  const std::size_t d = dim();
  Tensor m = Tensor::matrix(rows.size(), d);
  for (std::size_t k = 0; k < rows.size(); ++k) std::copy_n(features_.data() + rows[k] * d, d, m.data() + k * d);
  return m;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  const std::size_t d = dim();
  Tensor f = Tensor::matrix(rows.size(), d);
  std::vector<int> labels(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= size()) throw DataError("subset row out of range");
    std::copy_n(features_.data() + rows[k] * d, d, f.data() + k * d);
    labels[k] = labels_[rows[k]];
  }
  return from_class_indices(std::move(f), std::move(labels), class_labels_);
}

Dataset Dataset::with_features(Tensor features) const {
  return from_class_indices(std::move(features), labels_, class_labels_);
}

std::vector<int> Dataset::source_labels() const {
  std::vector<int> s(labels_.size());
  for (std::size_t r = 0; r < labels_.size(); ++r) s[r] = class_labels_[static_cast<std::size_t>(labels_[r])];
  return s;
}

Split subsample_imbalanced(const Dataset& full, const ImbalanceSpec& spec) {
  const std::size_t c = full.class_count();
  if (spec.counts.size() != c) {
    throw DataError("imbalance spec lists " + std::to_string(spec.counts.size()) + " counts for " +
                    std::to_string(c) + " classes");
  }
  // Class indices in ascending source-label order.
  std::vector<std::size_t> by_label(c);
  std::iota(by_label.begin(), by_label.end(), 0);
  std::sort(by_label.begin(), by_label.end(),
            [&](std::size_t a, std::size_t b) { return full.class_labels()[a] < full.class_labels()[b]; });

  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> train_rows, test_rows;
  for (std::size_t k = 0; k < c; ++k) {
    const std::size_t cls = by_label[k];
    if (spec.counts[k] == 0) throw DataError("imbalance counts must be positive");
    std::vector<std::size_t> rows = full.class_index()[cls];
    if (rows.size() < spec.counts[k] + spec.test_per_class) {
      throw DataError("class with label " + std::to_string(full.class_labels()[cls]) + " has " +
                      std::to_string(rows.size()) + " rows, needs " +
                      std::to_string(spec.counts[k] + spec.test_per_class));
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(spec.test_per_class));
    train_rows.insert(train_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(spec.test_per_class),
                      rows.begin() + static_cast<std::ptrdiff_t>(spec.test_per_class + spec.counts[k]));
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  auto gather = [&](const std::vector<std::size_t>& rows, Tensor& f, std::vector<int>& labels) {
    const std::size_t d = full.dim();
    f = Tensor::matrix(rows.size(), d);
    labels.resize(rows.size());
    const auto src = full.source_labels();
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::copy_n(full.features().data() + rows[k] * d, d, f.data() + k * d);
      labels[k] = src[rows[k]];
    }
  };
  Tensor f;
  std::vector<int> labels;
  gather(train_rows, f, labels);
  Split out;
  out.train = Dataset::from_source_labels(std::move(f), labels);
  gather(test_rows, f, labels);
  out.test = Dataset::with_class_labels(std::move(f), labels, out.train.class_labels());
  return out;
}

Split stratified_holdout(const Dataset& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("holdout fraction must lie in (0, 1)");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> keep, held;
  for (std::size_t i = 0; i < data.class_count(); ++i) {
    std::vector<std::size_t> rows = data.class_index()[i];
    if (rows.size() < 2) {
      throw DataError("class " + std::to_string(i) + " has fewer than 2 rows; cannot hold out a validation sample");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto h = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * rows.size())));
    held.insert(held.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(h));
    keep.insert(keep.end(), rows.begin() + static_cast<std::ptrdiff_t>(h), rows.end());
  }
  std::sort(keep.begin(), keep.end());
  std::sort(held.begin(), held.end());
  return {data.subset(keep), data.subset(held)};
}

Standardizer Standardizer::fit(const Tensor& features) {
  const std::size_t n = features.rows(), d = features.cols();
  if (n == 0) throw DataError("cannot fit a standardizer on zero rows");
  Standardizer s;
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += features(r, j);
  for (auto& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = features(r, j) - s.mean[j];
      s.scale[j] += diff * diff;
    }
  for (auto& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(n));
    if (v < 1e-12) v = 1.0;
  }
  return s;
}

Tensor Standardizer::apply(const Tensor& features) const {
  if (features.cols() != mean.size()) throw ShapeError("standardizer fitted on a different width");
  Tensor out = features;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t j = 0; j < out.cols(); ++j) out(r, j) = (out(r, j) - mean[j]) / scale[j];
  return out;
}

}  // namespace gamo::data
