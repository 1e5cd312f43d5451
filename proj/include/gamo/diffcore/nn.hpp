#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gamo/diffcore/tape.hpp"

namespace gamo::diff {

enum class Activation { Identity, Relu, Sigmoid, Softmax };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

struct DenseLayer {
  Parameter weight;  // out x in
  Parameter bias;    // out
  Activation activation = Activation::Identity;

  std::size_t in_dim() const noexcept { return weight.value.cols(); }
  std::size_t out_dim() const noexcept { return weight.value.rows(); }
};

/// Whether a network's parameters are traced as trainable or borrowed as
/// constants. A frozen network never appears in the gradient map.
enum class Mode { Trainable, Frozen };

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  Var forward(Tape& tape, Var input, Mode mode = Mode::Trainable) const;
  // Untraced evaluation.
  Tensor forward(const Tensor& input) const;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  bool empty() const noexcept { return layers_.empty(); }
  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::vector<std::size_t> dims() const;
  std::vector<Activation> activations() const;

  // Every trainable array exactly once, in layer order (weight, bias).
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::size_t parameter_count() const;

 private:
  std::vector<DenseLayer> layers_;
};

// He-normal weights for relu layers, Xavier-normal otherwise; zero biases.
// Parameters are named "<prefix>/<layer>/weight" and ".../bias".
Mlp init_mlp(std::span<const std::size_t> dims, std::span<const Activation> activations, std::uint64_t seed,
             std::string_view prefix = "mlp");

// Order-sensitive FNV-1a hash over the raw bytes of every parameter.
std::uint64_t parameter_hash(std::span<const Parameter* const> params);
std::uint64_t parameter_hash(const Mlp& net);

}  // namespace gamo::diff
