#include "gamo/diffcore/nn.hpp"

#include <bit>
#include <cmath>
#include <random>

#include "gamo/diffcore/ops.hpp"
#include "gamo/error.hpp"

namespace gamo::diff {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Softmax: return "softmax";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "softmax") return Activation::Softmax;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.weight.value.rank() != 2 || l.bias.value.size() != l.out_dim()) {
      throw ShapeError("layer " + std::to_string(i) + ": weight " + shape_string(l.weight.value.shape()) +
                       " inconsistent with bias " + shape_string(l.bias.value.shape()));
    }
    if (i > 0 && layers_[i - 1].out_dim() != l.in_dim()) {
      throw ShapeError("layer " + std::to_string(i) + " expects " + std::to_string(l.in_dim()) +
                       " inputs but previous layer emits " + std::to_string(layers_[i - 1].out_dim()));
    }
  }
}

std::size_t Mlp::in_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
std::size_t Mlp::out_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }

std::vector<std::size_t> Mlp::dims() const {
  std::vector<std::size_t> d;
  if (layers_.empty()) return d;
  d.push_back(in_dim());
  for (const auto& l : layers_) d.push_back(l.out_dim());
  return d;
}

std::vector<Activation> Mlp::activations() const {
  std::vector<Activation> a;
  for (const auto& l : layers_) a.push_back(l.activation);
  return a;
}

Var Mlp::forward(Tape& tape, Var input, Mode mode) const {
  if (layers_.empty()) throw ShapeError("forward through an empty network");
  if (input.cols() != in_dim()) {
    throw ShapeError("network expects " + std::to_string(in_dim()) + " input features, got " +
                     shape_string(input.shape()));
  }
  Var x = input;
  for (const auto& l : layers_) {
    Var w = mode == Mode::Trainable ? tape.parameter(l.weight) : tape.borrow(l.weight.value);
    Var b = mode == Mode::Trainable ? tape.parameter(l.bias) : tape.borrow(l.bias.value);
    x = add_row(matmul_nt(x, w), b);
    switch (l.activation) {
      case Activation::Identity: break;
      case Activation::Relu: x = relu(x); break;
      case Activation::Sigmoid: x = sigmoid(x); break;
      case Activation::Softmax: x = softmax(x); break;
    }
  }
  return x;
}

Tensor Mlp::forward(const Tensor& input) const {
  Tape tape;
  return forward(tape, tape.borrow(input), Mode::Frozen).value();
}

std::vector<Parameter*> Mlp::parameters() {
  std::vector<Parameter*> out;
  for (auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Parameter*> Mlp::parameters() const {
  std::vector<const Parameter*> out;
  for (const auto& l : layers_) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

Mlp init_mlp(std::span<const std::size_t> dims, std::span<const Activation> activations, std::uint64_t seed,
             std::string_view prefix) {
  if (dims.size() < 2) throw ConfigError("init_mlp needs at least an input and an output dimension");
  if (activations.size() != dims.size() - 1) {
    throw ConfigError("init_mlp: " + std::to_string(dims.size() - 1) + " layers but " +
                      std::to_string(activations.size()) + " activations");
  }
  for (auto d : dims)
    if (d == 0) throw ConfigError("init_mlp: dimensions must be positive");

  std::mt19937_64 rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const std::size_t in = dims[i], out = dims[i + 1];
    const double stddev = activations[i] == Activation::Relu ? std::sqrt(2.0 / static_cast<double>(in))
                                                             : std::sqrt(2.0 / static_cast<double>(in + out));
    std::normal_distribution<double> normal(0.0, stddev);
    DenseLayer layer;
    const std::string base = std::string(prefix) + "/" + std::to_string(i);
    layer.weight = {base + "/weight", Tensor::matrix(out, in)};
    for (auto& w : layer.weight.value.values()) w = normal(rng);
    layer.bias = {base + "/bias", Tensor(Tensor::Shape{out}, 0.0)};
    layer.activation = activations[i];
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

std::uint64_t parameter_hash(std::span<const Parameter* const> params) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto* p : params) {
    for (double v : p->value.values()) {
      auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) {
        h ^= (bits >> (8 * b)) & 0xffu;
        h *= 1099511628211ull;
      }
    }
  }
  return h;
}

std::uint64_t parameter_hash(const Mlp& net) { return parameter_hash(net.parameters()); }

}  // namespace gamo::diff
