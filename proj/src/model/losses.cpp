#include "gamo/model/losses.hpp"

#include <string>

#include "gamo/diffcore/ops.hpp"
#include "gamo/error.hpp"

namespace gamo::model {

namespace {

using namespace gamo::diff;

double inv_rows(const Var& v) {
  if (v.rows() == 0) throw ShapeError("loss over an empty batch");
  return 1.0 / static_cast<double>(v.rows());
}

// -sum(mask * [t log p + (1-t) log(1-p)]) / rows
Var masked_ce(Var p, const Tensor& target, const Tensor* mask) {
  Tape& tape = p.tape();
  const Var t = tape.constant(target);
  Var terms = add(mul(t, log(p)), mul(one_minus(t), log(one_minus(p))));
  if (mask) terms = mul(tape.constant(*mask), terms);
  return scale(sum(terms), -inv_rows(p));
}

// sum(mask * (p - t)^2) / rows
Var masked_ls(Var p, const Tensor& target, const Tensor* mask) {
  Var terms = square(sub(p, p.tape().constant(target)));
  if (mask) terms = mul(p.tape().constant(*mask), terms);
  return scale(sum(terms), inv_rows(p));
}

void check_single_column(const Var& d) {
  if (d.cols() != 1 || d.value().rank() != 2) throw ShapeError("discriminator output must be a b x 1 matrix");
}

}  // namespace

Var classifier_loss(LossVariant v, Var m_out, std::span<const int> labels) {
  if (labels.size() != m_out.rows()) throw ShapeError("classifier loss: one label per row required");
  const Tensor target = one_hot(labels, m_out.cols());
  return v == LossVariant::CrossEntropy ? masked_ce(m_out, target, nullptr) : masked_ls(m_out, target, nullptr);
}

Var generator_loss_vs_classifier(LossVariant v, Var m_out, std::span<const int> labels) {
  if (labels.size() != m_out.rows()) throw ShapeError("generator loss: one label per row required");
  const std::size_t c = m_out.cols();
  Tensor target = Tensor::matrix(labels.size(), c);
  Tensor mask = Tensor::matrix(labels.size(), c);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) + 1 >= c) {
      throw ConfigError("generator loss: label " + std::to_string(labels[r]) + " is not a minority class");
    }
    for (std::size_t j = 0; j + 1 < c; ++j) {
      mask(r, j) = 1.0;
      target(r, j) = j == static_cast<std::size_t>(labels[r]) ? 0.0 : 1.0;
    }
  }
  return v == LossVariant::CrossEntropy ? masked_ce(m_out, target, &mask) : masked_ls(m_out, target, &mask);
}

Var generator_loss_vs_discriminator(LossVariant v, Var d_out) {
  check_single_column(d_out);
  const Tensor ones = Tensor::matrix(d_out.rows(), 1, 1.0);
  return v == LossVariant::CrossEntropy ? scale(sum(log(d_out)), -inv_rows(d_out)) : masked_ls(d_out, ones, nullptr);
}

Var generator_loss(LossVariant v, Var m_out, Var d_out, std::span<const int> labels) {
  return add(generator_loss_vs_classifier(v, m_out, labels), generator_loss_vs_discriminator(v, d_out));
}

Var discriminator_loss(LossVariant v, Var d_out, bool real) {
  check_single_column(d_out);
  if (v == LossVariant::CrossEntropy) {
    return scale(sum(log(real ? d_out : one_minus(d_out))), -inv_rows(d_out));
  }
  return masked_ls(d_out, Tensor::matrix(d_out.rows(), 1, real ? 1.0 : 0.0), nullptr);
}

}  // namespace gamo::model
