#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gamo::eval {

/// Square count matrix; rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes);

  static ConfusionMatrix from_predictions(std::size_t classes, std::span<const int> truth,
                                          std::span<const int> predicted);

  void add(int truth, int predicted, std::uint64_t count = 1);

  std::size_t classes() const noexcept { return classes_; }
  std::uint64_t operator()(std::size_t truth, std::size_t predicted) const noexcept {
    return counts_[truth * classes_ + predicted];
  }
  std::uint64_t row_sum(std::size_t truth) const noexcept;
  std::uint64_t total() const noexcept;

  // Per-class recall (diagonal / row sum). Throws if a row is empty.
  std::vector<double> recalls() const;

 private:
  std::size_t classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

// Average class-specific accuracy: mean of per-class recalls.
double acsa(const ConfusionMatrix& cm);
// Geometric mean of per-class recalls; exactly 0 when any recall is 0.
double gm(const ConfusionMatrix& cm);

struct EvalReport {
  std::string variant;
  std::string loss;
  std::uint64_t seed = 0;
  ConfusionMatrix confusion;
  std::vector<double> recalls;
  double acsa = 0.0;
  double gm = 0.0;
};

EvalReport make_report(ConfusionMatrix cm, std::string variant = {}, std::string loss = {}, std::uint64_t seed = 0);

}  // namespace gamo::eval
