#pragma once

#include <span>

#include "gamo/model/networks.hpp"

// Per-sample losses averaged over the batch. Class priors enter through the
// sampling scheme of the trainer, never as per-sample weights.

namespace gamo::model {

// M on labelled rows (real or generated). CE: -[log M_y + sum_{i!=y} log(1-M_i)];
// LS: (1-M_y)^2 + sum_{i!=y} M_i^2.
Var classifier_loss(LossVariant v, Var m_out, std::span<const int> labels);

// G against a frozen M for generated rows of minority class i. Targets are
// the ones' complement of onehot(i) over the minority lines; the majority
// line is left out. CE: -[log(1-M_i) + sum_{j!=i, j<c-1} log M_j];
// LS: M_i^2 + sum_{j!=i, j<c-1} (1-M_j)^2.
Var generator_loss_vs_classifier(LossVariant v, Var m_out, std::span<const int> labels);

// G against a frozen D. CE: -log D; LS: (1-D)^2.
Var generator_loss_vs_discriminator(LossVariant v, Var d_out);

// Sum of the two generator terms.
Var generator_loss(LossVariant v, Var m_out, Var d_out, std::span<const int> labels);

// CE: -log D (real) / -log(1-D) (generated); LS: (1-D)^2 / D^2.
Var discriminator_loss(LossVariant v, Var d_out, bool real);

}  // namespace gamo::model
