#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "gamo/diffcore/tape.hpp"

namespace gamo::diff {

enum class OptimizerKind { Sgd, Adam };

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First-order optimizer over a fixed parameter registry.
///
/// Parameters that are absent from the gradient map passed to step() are
/// left untouched, including their Adam moments.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerConfig config, std::vector<Parameter*> params);

  // Validates every gradient first; a non-finite or mis-shaped gradient
  // throws before any parameter is modified.
  void step(const GradientMap& grads);

  const OptimizerConfig& config() const noexcept { return config_; }
  std::uint64_t step_count() const noexcept { return steps_; }
  const std::vector<Parameter*>& parameters() const noexcept { return params_; }

 private:
  OptimizerConfig config_;
  std::vector<Parameter*> params_;
  std::vector<Tensor> first_moment_;
  std::vector<Tensor> second_moment_;
  std::uint64_t steps_ = 0;
};

}  // namespace gamo::diff
