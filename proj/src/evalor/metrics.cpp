#include "gamo/evalor/metrics.hpp"

#include <cmath>
#include <numeric>

#include "gamo/error.hpp"

namespace gamo::eval {

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : classes_(classes), counts_(classes * classes, 0) {}

ConfusionMatrix ConfusionMatrix::from_predictions(std::size_t classes, std::span<const int> truth,
                                                  std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw ShapeError("truth and prediction counts differ");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return cm;
}

void ConfusionMatrix::add(int truth, int predicted, std::uint64_t count) {
  if (truth < 0 || predicted < 0 || static_cast<std::size_t>(truth) >= classes_ ||
      static_cast<std::size_t>(predicted) >= classes_) {
    throw DataError("confusion entry (" + std::to_string(truth) + ", " + std::to_string(predicted) +
                    ") outside " + std::to_string(classes_) + " classes");
  }
  counts_[static_cast<std::size_t>(truth) * classes_ + static_cast<std::size_t>(predicted)] += count;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const noexcept {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < classes_; ++p) s += (*this)(truth, p);
  return s;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::vector<double> ConfusionMatrix::recalls() const {
  std::vector<double> r(classes_);
  for (std::size_t t = 0; t < classes_; ++t) {
    const auto n = row_sum(t);
    if (n == 0) throw DataError("class " + std::to_string(t) + " has no test samples; recall undefined");
    r[t] = static_cast<double>((*this)(t, t)) / static_cast<double>(n);
  }
  return r;
}

double acsa(const ConfusionMatrix& cm) {
  const auto r = cm.recalls();
  if (r.empty()) throw DataError("ACSA of an empty confusion matrix");
  double s = 0.0;
  for (double v : r) s += v;
  return s / static_cast<double>(r.size());
}

double gm(const ConfusionMatrix& cm) {
  const auto r = cm.recalls();
  if (r.empty()) throw DataError("GM of an empty confusion matrix");
  double product = 1.0;
  for (double v : r) product *= v;
  if (product == 0.0) return 0.0;
  return std::pow(product, 1.0 / static_cast<double>(r.size()));
}

EvalReport make_report(ConfusionMatrix cm, std::string variant, std::string loss, std::uint64_t seed) {
  EvalReport rep;
  rep.variant = std::move(variant);
  rep.loss = std::move(loss);
  rep.seed = seed;
  rep.recalls = cm.recalls();
  rep.acsa = acsa(cm);
  rep.gm = gm(cm);
  rep.confusion = std::move(cm);
  return rep;
}

}  // namespace gamo::eval
