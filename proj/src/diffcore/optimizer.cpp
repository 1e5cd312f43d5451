#include "gamo/diffcore/optimizer.hpp"

#include <cmath>
#include <string>

#include "gamo/error.hpp"

namespace gamo::diff {

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer_kind(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "'");
}

Optimizer::Optimizer(OptimizerConfig config, std::vector<Parameter*> params)
    : config_(config), params_(std::move(params)) {
  if (!(config_.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  for (const auto* p : params_) {
    first_moment_.emplace_back(p->value.shape(), 0.0);
    second_moment_.emplace_back(p->value.shape(), 0.0);
  }
}

void Optimizer::step(const GradientMap& grads) {
  std::vector<const Tensor*> gs(params_.size(), nullptr);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const Tensor* g = grads.find(*params_[i]);
    if (g == nullptr) continue;
    if (!g->same_shape(params_[i]->value)) {
      throw ShapeError("gradient for '" + params_[i]->name + "' has shape " + shape_string(g->shape()) +
                       ", parameter has " + shape_string(params_[i]->value.shape()));
    }
    if (!g->all_finite()) throw NumericError("non-finite gradient for parameter '" + params_[i]->name + "'");
    gs[i] = g;
  }

  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::Sgd) {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (!gs[i]) continue;
      auto& w = params_[i]->value;
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * (*gs[i])[j];
    }
    return;
  }

  const double b1 = config_.beta1, b2 = config_.beta2;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!gs[i]) continue;
    auto& w = params_[i]->value;
    auto& m = first_moment_[i];
    auto& v = second_moment_[i];
    const Tensor& g = *gs[i];
    for (std::size_t j = 0; j < w.size(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      w[j] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

}  // namespace gamo::diff
