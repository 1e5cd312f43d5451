#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gamo/diffcore/tensor.hpp"

namespace gamo::data {

using diff::Tensor;

/// Labelled feature matrix with per-class row sets and empirical priors.
///
/// Class indices are ordered by ascending class size, so index c-1 is the
/// majority. `class_labels[i]` keeps the source label of class index i.
class Dataset {
 public:
  Dataset() = default;

  // Re-indexes classes by ascending size (ties by source label).
  static Dataset from_source_labels(Tensor features, std::span<const int> source_labels);
  // Keeps an existing class mapping (e.g. a test split that must share the
  // training set's indices). Every source label must appear in
  // `class_labels`; classes may be empty and sizes may come in any order.
  static Dataset with_class_labels(Tensor features, std::span<const int> source_labels,
                                   std::vector<int> class_labels);
  // Labels are already class indices under `class_labels`.
  static Dataset from_class_indices(Tensor features, std::vector<int> labels, std::vector<int> class_labels);

  const Tensor& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::vector<std::size_t>>& class_index() const noexcept { return class_index_; }
  const std::vector<double>& priors() const noexcept { return priors_; }
  const std::vector<int>& class_labels() const noexcept { return class_labels_; }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return features_.cols(); }
  std::size_t class_count() const noexcept { return class_labels_.size(); }
  std::size_t class_size(std::size_t i) const { return class_index_.at(i).size(); }
  std::vector<std::size_t> class_sizes() const;
  // Largest over smallest class size.
  double imbalance_ratio() const;

  // Rows of class i as an n_i x D matrix (the set X_i).
  Tensor class_matrix(std::size_t i) const;
  // Subset keeping this dataset's class mapping.
  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_features(Tensor features) const;
  // Source labels per row.
  std::vector<int> source_labels() const;

  // Re-checks partition and priors; throws DataError.
  void validate() const;
  // Throws DataError unless class sizes are nondecreasing in class index
  // (always true for from_source_labels).
  void require_size_order() const;

 private:
  Tensor features_;
  std::vector<int> labels_;
  std::vector<std::vector<std::size_t>> class_index_;
  std::vector<double> priors_;
  std::vector<int> class_labels_;

  void index();
};

/// Per-class sample counts for an imbalanced split. counts[k] applies to
/// the k-th smallest source label.
struct ImbalanceSpec {
  std::vector<std::size_t> counts;
  std::size_t test_per_class = 0;
  std::uint64_t seed = 0;
};

struct Split {
  Dataset train;
  Dataset test;
};

// Draws test_per_class rows per class first, then counts[k] training rows
// from the remainder. The test set uses the training set's class mapping.
Split subsample_imbalanced(const Dataset& full, const ImbalanceSpec& spec);

// Stratified holdout: max(1, round(fraction * n_i)) rows of every class go
// to the second set. Throws DataError if a class has fewer than 2 rows.
Split stratified_holdout(const Dataset& data, double fraction, std::uint64_t seed);

/// Per-feature affine map to zero mean / unit variance, fitted on one set.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Tensor& features);
  Tensor apply(const Tensor& features) const;
};

}  // namespace gamo::data
