#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gamo/diffcore/tensor.hpp"

namespace gamo::diff {

/// A named trainable array. Networks own their parameters; a tape only
/// borrows them for the lifetime of one trace.
struct Parameter {
  std::string name;
  Tensor value;
};

class Tape;

/// Handle to a tensor recorded on a tape.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor::Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Gradients of a scalar loss with respect to every parameter that was
/// traced as trainable.
class GradientMap {
 public:
  using Entry = std::pair<const Parameter*, Tensor>;

  const Tensor* find(const Parameter& p) const noexcept;
  const Tensor& at(const Parameter& p) const;
  bool contains(const Parameter& p) const noexcept { return find(p) != nullptr; }
  std::size_t size() const noexcept { return entries_.size(); }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }

  void add(const Parameter& p, Tensor g);

 private:
  std::vector<Entry> entries_;
};

/// Define-by-run reverse-mode tape. A new tape is built per minibatch; nodes
/// are appended in evaluation order, so reverse order is a valid topological
/// order for the backward sweep.
class Tape {
 public:
  // Receives the gradient flowing into the node; pushes contributions into
  // the parents via Tape::grad_of.
  using BackwardFn = std::function<void(Tape&, const Tensor& grad_out)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Copied into the tape; never receives gradients.
  Var constant(Tensor value);
  // Referenced without copying; the caller keeps `value` alive and unchanged
  // for the lifetime of the tape. Never receives gradients.
  Var borrow(const Tensor& value);
  // Input that receives a gradient, readable through grad() after backward.
  Var leaf(Tensor value);
  // Borrowed parameter whose gradient is reported by backward().
  Var parameter(const Parameter& p);

  // Appends a computed node. `fn` is kept only if some parent requires a
  // gradient. Throws NumericError on non-finite values.
  Var record(Tensor value, std::span<const Var> parents, BackwardFn fn, const char* op);
  Var record(Tensor value, std::initializer_list<Var> parents, BackwardFn fn, const char* op) {
    return record(std::move(value), std::span<const Var>(parents.begin(), parents.size()), std::move(fn), op);
  }

  // Reverse sweep from a scalar loss. The tape is consumed afterwards.
  GradientMap backward(Var loss);

  const Tensor& value(const Var& v) const;
  const Tensor& value(std::size_t id) const;
  // Gradient accumulated at a node during backward (zeros if none reached it).
  const Tensor& grad(const Var& v) const;
  // Mutable gradient buffer of a node, zero-initialised on first access.
  Tensor& grad_of(std::size_t id);
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  std::size_t size() const noexcept { return nodes_.size(); }
  bool consumed() const noexcept { return consumed_; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* borrowed = nullptr;
    Tensor grad;
    BackwardFn backward;
    const Parameter* param = nullptr;
    bool requires_grad = false;
    bool has_grad = false;
  };

  Var push(Node node);
  void check_open() const;

  std::vector<Node> nodes_;
  bool consumed_ = false;
};

}  // namespace gamo::diff
