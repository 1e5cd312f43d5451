#include "gamo/diffcore/tape.hpp"

#include "gamo/error.hpp"

namespace gamo::diff {

const Tensor& Var::value() const { return tape_->value(*this); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

const Tensor* GradientMap::find(const Parameter& p) const noexcept {
  for (const auto& [param, g] : entries_)
    if (param == &p) return &g;
  return nullptr;
}

const Tensor& GradientMap::at(const Parameter& p) const {
  if (const auto* g = find(p)) return *g;
  throw Error("no gradient recorded for parameter '" + p.name + "'");
}

void GradientMap::add(const Parameter& p, Tensor g) {
  for (auto& [param, existing] : entries_) {
    if (param == &p) {
      for (std::size_t i = 0; i < g.size(); ++i) existing[i] += g[i];
      return;
    }
  }
  entries_.emplace_back(&p, std::move(g));
}

void Tape::check_open() const {
  if (consumed_) throw Error("tape already consumed by backward()");
}

Var Tape::push(Node node) {
  check_open();
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.owned = std::move(value);
  return push(std::move(n));
}

Var Tape::borrow(const Tensor& value) {
  Node n;
  n.borrowed = &value;
  return push(std::move(n));
}

Var Tape::leaf(Tensor value) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::parameter(const Parameter& p) {
  Node n;
  n.borrowed = &p.value;
  n.param = &p;
  n.requires_grad = true;
  return push(std::move(n));
}

Var Tape::record(Tensor value, std::span<const Var> parents, BackwardFn fn, const char* op) {
  if (!value.all_finite()) throw NumericError(std::string("non-finite output from op '") + op + "'");
  Node n;
  n.owned = std::move(value);
  for (const auto& p : parents) {
    if (p.tape_ != this) throw Error(std::string("op '") + op + "' mixes tensors from different tapes");
    n.requires_grad = n.requires_grad || nodes_[p.id_].requires_grad;
  }
  if (n.requires_grad) n.backward = std::move(fn);
  return push(std::move(n));
}

const Tensor& Tape::value(const Var& v) const { return value(v.id_); }

const Tensor& Tape::value(std::size_t id) const {
  const auto& n = nodes_[id];
  return n.borrowed ? *n.borrowed : n.owned;
}

Tensor& Tape::grad_of(std::size_t id) {
  auto& n = nodes_[id];
  if (!n.has_grad) {
    n.grad = Tensor(value(id).shape(), 0.0);
    n.has_grad = true;
  }
  return n.grad;
}

const Tensor& Tape::grad(const Var& v) const {
  const auto& n = nodes_[v.id_];
  if (!n.has_grad) {
    // Lazily materialise zeros so callers can always read a gradient.
    return const_cast<Tape*>(this)->grad_of(v.id_);
  }
  return n.grad;
}

GradientMap Tape::backward(Var loss) {
  check_open();
  if (loss.tape_ != this) throw Error("backward() on a tensor from another tape");
  if (value(loss).size() != 1) {
    throw ShapeError("backward() needs a scalar loss, got shape " + shape_string(value(loss).shape()));
  }
  if (!nodes_[loss.id_].requires_grad) throw Error("backward() on a loss that depends on no traced input");

  grad_of(loss.id_).fill(1.0);
  for (std::size_t id = loss.id_ + 1; id-- > 0;) {
    auto& n = nodes_[id];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad);
  }

  GradientMap out;
  for (auto& n : nodes_) {
    if (n.param == nullptr) continue;
    if (!n.grad.all_finite()) throw NumericError("non-finite gradient for parameter '" + n.param->name + "'");
    out.add(*n.param, n.has_grad ? n.grad : Tensor(n.borrowed->shape(), 0.0));
  }
  consumed_ = true;
  return out;
}

}  // namespace gamo::diff
