#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gamo/diffcore/nn.hpp"
#include "gamo/diffcore/tape.hpp"

namespace gamo::model {

using diff::Mlp;
using diff::Mode;
using diff::Parameter;
using diff::Tape;
using diff::Tensor;
using diff::Var;

enum class LossVariant { CrossEntropy, LeastSquares };

std::string_view to_string(LossVariant v);  // "CE" / "LS"
LossVariant parse_loss_variant(std::string_view name);

// splitmix64 over (seed, stream); gives each network its own init stream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// rows x classes indicator matrix; throws ShapeError on an out-of-range label.
Tensor one_hot(std::span<const int> labels, std::size_t classes);

// Dense stack dims.front() -> ... -> dims.back() with relu on every hidden
// layer and `last` on the output layer.
Mlp make_stack(std::span<const std::size_t> dims, diff::Activation last, std::uint64_t seed,
               std::string_view prefix);

// F: identity (flattened inputs) or a dense map into the feature space.
class FeatureExtractor {
 public:
  FeatureExtractor() = default;
  explicit FeatureExtractor(Mlp net) : net_(std::move(net)) {}

  bool identity() const noexcept { return net_.empty(); }
  Var forward(Tape& tape, Var x, Mode mode) const;
  Tensor forward(const Tensor& x) const;

  Mlp& net() noexcept { return net_; }
  const Mlp& net() const noexcept { return net_; }

 private:
  Mlp net_;
};

// M: c independent sigmoid lines.
class Classifier {
 public:
  Classifier() = default;
  explicit Classifier(Mlp net);

  Var forward(Tape& tape, Var x, Mode mode) const { return net_.forward(tape, x, mode); }
  Tensor forward(const Tensor& x) const { return net_.forward(x); }
  std::size_t classes() const { return net_.out_dim(); }

  Mlp& net() noexcept { return net_; }
  const Mlp& net() const noexcept { return net_; }

 private:
  Mlp net_;
};

// Row-wise argmax; an exact tie goes to the smaller class index.
std::vector<int> argmax_rows(const Tensor& scores);
std::vector<int> predict(const Classifier& m, const Tensor& features);

// D(x | i): features concatenated with onehot(i), one sigmoid output.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(Mlp net, std::size_t classes);

  Var forward(Tape& tape, Var x, std::span<const int> labels, Mode mode) const;
  Tensor forward(const Tensor& x, std::span<const int> labels) const;
  std::size_t classes() const noexcept { return classes_; }

  Mlp& net() noexcept { return net_; }
  const Mlp& net() const noexcept { return net_; }

 private:
  Mlp net_;
  std::size_t classes_ = 0;
};

}  // namespace gamo::model
