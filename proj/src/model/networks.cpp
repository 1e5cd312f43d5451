#include "gamo/model/networks.hpp"

#include <string>

#include "gamo/diffcore/ops.hpp"
#include "gamo/error.hpp"

namespace gamo::model {

std::string_view to_string(LossVariant v) { return v == LossVariant::CrossEntropy ? "CE" : "LS"; }

LossVariant parse_loss_variant(std::string_view name) {
  if (name == "CE" || name == "ce") return LossVariant::CrossEntropy;
  if (name == "LS" || name == "ls") return LossVariant::LeastSquares;
  throw ConfigError("unknown loss variant '" + std::string(name) + "' (expected CE or LS)");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Tensor one_hot(std::span<const int> labels, std::size_t classes) {
  Tensor t = Tensor::matrix(labels.size(), classes);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= classes) {
      throw ShapeError("label " + std::to_string(labels[r]) + " out of range for " + std::to_string(classes) +
                       " classes");
    }
    t(r, static_cast<std::size_t>(labels[r])) = 1.0;
  }
  return t;
}

Mlp make_stack(std::span<const std::size_t> dims, diff::Activation last, std::uint64_t seed,
               std::string_view prefix) {
  std::vector<diff::Activation> acts(dims.size() > 1 ? dims.size() - 1 : 0, diff::Activation::Relu);
  if (!acts.empty()) acts.back() = last;
  return diff::init_mlp(dims, acts, seed, prefix);
}

Var FeatureExtractor::forward(Tape& tape, Var x, Mode mode) const {
  return identity() ? x : net_.forward(tape, x, mode);
}

Tensor FeatureExtractor::forward(const Tensor& x) const { return identity() ? x : net_.forward(x); }

Classifier::Classifier(Mlp net) : net_(std::move(net)) {
  if (net_.empty() || net_.activations().back() != diff::Activation::Sigmoid) {
    throw ConfigError("classifier output layer must use sigmoid lines");
  }
}

std::vector<int> argmax_rows(const Tensor& scores) {
  std::vector<int> out(scores.rows());
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const auto row = scores.row(r);
    std::size_t best = 0;
    for (std::size_t j = 1; j < row.size(); ++j) {
      if (row[j] > row[best]) best = j;
    }
    out[r] = static_cast<int>(best);
  }
  return out;
}

std::vector<int> predict(const Classifier& m, const Tensor& features) { return argmax_rows(m.forward(features)); }

Discriminator::Discriminator(Mlp net, std::size_t classes) : net_(std::move(net)), classes_(classes) {
  if (net_.empty() || net_.out_dim() != 1 || net_.activations().back() != diff::Activation::Sigmoid) {
    throw ConfigError("discriminator needs a single sigmoid output");
  }
  if (net_.in_dim() <= classes_) throw ConfigError("discriminator input must hold features plus a one-hot class");
}

Var Discriminator::forward(Tape& tape, Var x, std::span<const int> labels, Mode mode) const {
  if (labels.size() != x.rows()) throw ShapeError("discriminator: one label per row required");
  const Var cond = tape.constant(one_hot(labels, classes_));
  return net_.forward(tape, diff::concat_cols(x, cond), mode);
}

Tensor Discriminator::forward(const Tensor& x, std::span<const int> labels) const {
  Tape tape;
  return forward(tape, tape.borrow(x), labels, Mode::Frozen).value();
}

}  // namespace gamo::model
