#include "gamo/oracle/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gamo/baselines/smote.hpp"
#include "gamo/diffcore/nn.hpp"
#include "gamo/diffcore/ops.hpp"
#include "gamo/model/generator.hpp"
#include "gamo/model/losses.hpp"
#include "gamo/trainer/sampling.hpp"

namespace gamo::oracle {

namespace {

using diff::Mlp;
using diff::Mode;
using diff::Tape;
using diff::Tensor;
using diff::Var;
using model::LossVariant;
using Rng = std::mt19937_64;
using Shape = Tensor::Shape;

constexpr LossVariant kVariants[] = {LossVariant::CrossEntropy, LossVariant::LeastSquares};

double clamped_log(double p) { return std::log(std::max(p, diff::kLogFloor)); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult below(std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(name), measured < tol, measured, tol, std::move(detail)};
}

CheckResult at_most(std::string name, double measured, double tol, std::string detail = {}) {
  return {std::move(name), measured <= tol, measured, tol, std::move(detail)};
}

double rel_error(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), kGradRelFloor});
}

// ---- gradient checks ----

enum class Domain { Any, AwayFromZero, Positive };

struct OpCase {
  std::string name;
  Domain domain;
  // Fills the input shapes of one instance; may stash per-instance data.
  std::function<std::vector<Shape>(Rng&)> shapes;
  std::function<Var(Tape&, std::span<const Var>)> build;
};

Tensor random_tensor(const Shape& shape, Domain domain, Rng& rng) {
  Tensor t(shape);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 2.0);
  for (auto& v : t.values()) {
    if (domain == Domain::Positive) {
      v = pos(rng);
    } else {
      do v = normal(rng);
      while (domain == Domain::AwayFromZero && std::abs(v) < 0.05);
    }
  }
  return t;
}

std::size_t dim(Rng& rng) { return std::uniform_int_distribution<std::size_t>(1, 4)(rng); }

// sum(R * op(inputs)) as a plain value.
double weighted_output(const OpCase& c, const std::vector<Tensor>& inputs, const Tensor& r) {
  Tape tape;
  std::vector<Var> vars;
  for (const auto& t : inputs) vars.push_back(tape.constant(t));
  const Var out = c.build(tape, vars);
  return diff::sum(diff::mul(tape.constant(r), out)).value().item();
}

double check_op_instance(const OpCase& c, Rng& rng, bool fault) {
  std::vector<Tensor> inputs;
  for (const auto& s : c.shapes(rng)) inputs.push_back(random_tensor(s, c.domain, rng));

  Tape tape;
  std::vector<Var> vars;
  for (const auto& t : inputs) vars.push_back(tape.leaf(t));
  const Var out = c.build(tape, vars);
  const Tensor r = random_tensor(out.shape(), Domain::Any, rng);
  tape.backward(diff::sum(diff::mul(tape.constant(r), out)));

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    Tensor analytic = tape.grad(vars[k]);
    if (fault && analytic.size() > 0) analytic[0] += 1e-2 * (1.0 + std::abs(analytic[0]));
    for (std::size_t e = 0; e < inputs[k].size(); ++e) {
      auto plus = inputs, minus = inputs;
      plus[k][e] += kFdStep;
      minus[k][e] -= kFdStep;
      const double numeric = (weighted_output(c, plus, r) - weighted_output(c, minus, r)) / (2.0 * kFdStep);
      worst = std::max(worst, rel_error(analytic[e], numeric));
    }
  }
  return worst;
}

std::vector<OpCase> op_cases() {
  using namespace gamo::diff;
  auto two_same = [](Rng& rng) {
    const std::size_t m = dim(rng), n = dim(rng);
    return std::vector<Shape>{{m, n}, {m, n}};
  };
  auto one = [](Rng& rng) { return std::vector<Shape>{{dim(rng), dim(rng)}}; };
  auto unary = [](Var (*f)(Var)) { return [f](Tape&, std::span<const Var> v) { return f(v[0]); }; };
  auto binary = [](Var (*f)(Var, Var)) { return [f](Tape&, std::span<const Var> v) { return f(v[0], v[1]); }; };

  auto rows = std::make_shared<std::vector<std::size_t>>();
  std::vector<OpCase> cases = {
      {"matmul", Domain::Any,
       [](Rng& rng) {
         const std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
         return std::vector<Shape>{{m, k}, {k, n}};
       },
       binary(matmul)},
      {"matmul_nt", Domain::Any,
       [](Rng& rng) {
         const std::size_t m = dim(rng), k = dim(rng), n = dim(rng);
         return std::vector<Shape>{{m, k}, {n, k}};
       },
       binary(matmul_nt)},
      {"add", Domain::Any, two_same, binary(add)},
      {"sub", Domain::Any, two_same, binary(sub)},
      {"mul", Domain::Any, two_same, binary(mul)},
      {"add_row", Domain::Any,
       [](Rng& rng) {
         const std::size_t m = dim(rng), n = dim(rng);
         return std::vector<Shape>{{m, n}, {n}};
       },
       binary(add_row)},
      {"scale", Domain::Any, one, [](Tape&, std::span<const Var> v) { return scale(v[0], -1.7); }},
      {"one_minus", Domain::Any, one, unary(one_minus)},
      {"relu", Domain::AwayFromZero, one, unary(relu)},
      {"sigmoid", Domain::Any, one, unary(sigmoid)},
      {"softmax", Domain::Any, one, unary(softmax)},
      {"log", Domain::Positive, one, unary(log)},
      {"square", Domain::Any, one, unary(square)},
      {"sum", Domain::Any, one, unary(sum)},
      {"mean", Domain::Any, one, unary(mean)},
      {"concat_cols", Domain::Any,
       [](Rng& rng) {
         const std::size_t m = dim(rng);
         return std::vector<Shape>{{m, dim(rng)}, {m, dim(rng)}};
       },
       binary(concat_cols)},
      {"concat_rows", Domain::Any,
       [](Rng& rng) {
         const std::size_t n = dim(rng);
         return std::vector<Shape>{{dim(rng), n}, {dim(rng), n}, {dim(rng), n}};
       },
       [](Tape&, std::span<const Var> v) { return concat_rows(v); }},
      {"row_select", Domain::Any,
       [rows](Rng& rng) {
         const std::size_t m = dim(rng), n = dim(rng);
         const std::size_t k = dim(rng) + 1;
         rows->clear();
         std::uniform_int_distribution<std::size_t> pick(0, m - 1);
         for (std::size_t i = 0; i < k; ++i) rows->push_back(pick(rng));
         return std::vector<Shape>{{m, n}};
       },
       [rows](Tape&, std::span<const Var> v) { return row_select(v[0], *rows); }},
  };
  return cases;
}

// Fresh random values so no bias sits exactly on a relu kink.
void randomize(const std::vector<diff::Parameter*>& params, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 0.5);
  for (auto* p : params)
    for (auto& v : p->value.values()) v = normal(rng);
}

// Gradient of a loss with respect to every parameter of `params`, against
// central differences on the parameter values themselves.
double check_parameters(std::vector<diff::Parameter*> params, const std::function<Var(Tape&, Mode)>& loss_fn,
                        bool fault) {
  Tape tape;
  const auto grads = tape.backward(loss_fn(tape, Mode::Trainable));
  auto value = [&] {
    Tape t;
    return loss_fn(t, Mode::Frozen).value().item();
  };
  double worst = 0.0;
  bool first = true;
  for (auto* p : params) {
    Tensor analytic = grads.at(*p);
    if (fault && first && analytic.size() > 0) analytic[0] += 1e-2 * (1.0 + std::abs(analytic[0]));
    first = false;
    for (std::size_t e = 0; e < p->value.size(); ++e) {
      const double keep = p->value[e];
      p->value[e] = keep + kFdStep;
      const double up = value();
      p->value[e] = keep - kFdStep;
      const double down = value();
      p->value[e] = keep;
      worst = std::max(worst, rel_error(analytic[e], (up - down) / (2.0 * kFdStep)));
    }
  }
  return worst;
}

// ---- distribution helpers ----

std::vector<double> random_simplex(std::size_t n, Rng& rng, double zero_prob) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double s = 0.0;
  while (!(s > 0.0)) {
    s = 0.0;
    for (auto& v : p) {
      v = u(rng) < zero_prob ? 0.0 : u(rng);
      s += v;
    }
  }
  for (auto& v : p) v /= s;
  return p;
}

std::vector<double> random_priors(std::size_t c, Rng& rng) {
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> p(c);
  for (auto& v : p) v = u(rng);
  std::sort(p.begin(), p.end());
  if (p[c - 1] <= p[c - 2]) p[c - 1] = p[c - 2] + 0.1;
  double s = 0.0;
  for (double v : p) s += v;
  for (auto& v : p) v /= s;
  return p;
}

eval::DiscreteDistributionSet random_set(std::size_t c, std::size_t support, Rng& rng) {
  eval::DiscreteDistributionSet s;
  s.support = support;
  s.priors = random_priors(c, rng);
  for (std::size_t i = 0; i < c; ++i) {
    s.real.push_back(random_simplex(support, rng, 0.2));
    s.generated.push_back(random_simplex(support, rng, 0.2));
  }
  return s;
}

}  // namespace

// ---- naive transcriptions ----

double naive_classifier_loss(LossVariant v, const Tensor& m, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto y = static_cast<std::size_t>(labels[r]);
    double term = 0.0;
    for (std::size_t i = 0; i < m.cols(); ++i) {
      const double p = m(r, i);
      if (v == LossVariant::CrossEntropy) {
        term -= i == y ? clamped_log(p) : clamped_log(1.0 - p);
      } else {
        term += i == y ? (1.0 - p) * (1.0 - p) : p * p;
      }
    }
    total += term;
  }
  return total / static_cast<double>(m.rows());
}

double naive_generator_loss_vs_classifier(LossVariant v, const Tensor& m, std::span<const int> labels) {
  const std::size_t c = m.cols();
  double total = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto i = static_cast<std::size_t>(labels[r]);
    double term = 0.0;
    if (v == LossVariant::CrossEntropy) {
      term -= clamped_log(1.0 - m(r, i));
      for (std::size_t j = 0; j + 1 < c; ++j) {
        if (j != i) term -= clamped_log(m(r, j));
      }
    } else {
      term += m(r, i) * m(r, i);
      for (std::size_t j = 0; j + 1 < c; ++j) {
        if (j != i) term += (1.0 - m(r, j)) * (1.0 - m(r, j));
      }
    }
    total += term;
  }
  return total / static_cast<double>(m.rows());
}

double naive_generator_loss_vs_discriminator(LossVariant v, const Tensor& d) {
  double total = 0.0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const double p = d(r, 0);
    total += v == LossVariant::CrossEntropy ? -clamped_log(p) : (1.0 - p) * (1.0 - p);
  }
  return total / static_cast<double>(d.rows());
}

double naive_discriminator_loss(LossVariant v, const Tensor& d, bool real) {
  double total = 0.0;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    const double p = d(r, 0);
    if (v == LossVariant::CrossEntropy) {
      total -= real ? clamped_log(p) : clamped_log(1.0 - p);
    } else {
      total += real ? (1.0 - p) * (1.0 - p) : p * p;
    }
  }
  return total / static_cast<double>(d.rows());
}

double naive_objective(const eval::DiscreteDistributionSet& s, const eval::ClassifierTable& m) {
  const std::size_t c = s.priors.size();
  const double pc = s.priors[c - 1];
  double j = 0.0;
  auto term = [&](double coeff, double prob, double value) {
    const double w = coeff * prob;
    if (w > 0.0) j += w * std::log(value);
  };
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t x = 0; x < s.support; ++x) {
      term(s.priors[i], s.real[i][x], m[i][x]);
      term(pc - s.priors[i], s.generated[i][x], m[i][x]);
      for (std::size_t k = 0; k < c; ++k) {
        if (k == i) continue;
        term(s.priors[k], s.real[k][x], 1.0 - m[i][x]);
        term(pc - s.priors[k], s.generated[k][x], 1.0 - m[i][x]);
      }
    }
  }
  return j;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return (a + b) / 2.0;
}

double naive_acsa(const eval::ConfusionMatrix& cm) {
  double s = 0.0;
  for (std::size_t t = 0; t < cm.classes(); ++t) {
    std::uint64_t n = 0;
    for (std::size_t p = 0; p < cm.classes(); ++p) n += cm(t, p);
    s += static_cast<double>(cm(t, t)) / static_cast<double>(n);
  }
  return s / static_cast<double>(cm.classes());
}

double naive_gm(const eval::ConfusionMatrix& cm) {
  double prod = 1.0;
  for (std::size_t t = 0; t < cm.classes(); ++t) {
    std::uint64_t n = 0;
    for (std::size_t p = 0; p < cm.classes(); ++p) n += cm(t, p);
    prod *= static_cast<double>(cm(t, t)) / static_cast<double>(n);
  }
  return prod == 0.0 ? 0.0 : std::pow(prod, 1.0 / static_cast<double>(cm.classes()));
}

// ---- checks ----

std::vector<CheckResult> gradient_checks(const OracleOptions& opt, std::size_t instances) {
  std::vector<CheckResult> out;
  Rng rng(opt.seed);
  for (const auto& c : op_cases()) {
    double worst = 0.0;
    for (std::size_t k = 0; k < instances; ++k) worst = std::max(worst, check_op_instance(c, rng, opt.inject_gradient_fault));
    out.push_back(below("grad/" + c.name, worst, kGradRelTol, std::to_string(instances) + " instances"));
  }

  // random 3-layer net, every parameter
  {
    double worst = 0.0;
    const std::size_t dims[] = {4, 5, 3, 2};
    const diff::Activation acts[] = {diff::Activation::Relu, diff::Activation::Sigmoid, diff::Activation::Softmax};
    for (std::size_t k = 0; k < instances; ++k) {
      Mlp net = diff::init_mlp(dims, acts, rng());
      randomize(net.parameters(), rng);
      const Tensor x = random_tensor({3, 4}, Domain::Any, rng);
      const Tensor t = random_tensor({3, 2}, Domain::Any, rng);
      auto loss = [&](Tape& tape, Mode mode) {
        const Var out = net.forward(tape, tape.borrow(x), mode);
        return diff::mean(diff::square(diff::sub(out, tape.constant(t))));
      };
      worst = std::max(worst, check_parameters(net.parameters(), loss, opt.inject_gradient_fault));
    }
    out.push_back(below("grad/mlp3", worst, kGradRelTol, std::to_string(instances) + " instances"));
  }

  // convex generator through frozen M and D, both loss variants
  for (auto v : kVariants) {
    double worst = 0.0;
    for (std::size_t k = 0; k < instances; ++k) {
      const std::size_t c = 3, d = 4;
      std::vector<Tensor> xs = {random_tensor({3, d}, Domain::Any, rng), random_tensor({5, d}, Domain::Any, rng)};
      model::GeneratorDims gd{3, 4, 6};
      auto g = model::make_convex_generator(gd, xs, c, rng());
      randomize(g.parameters(), rng);
      const std::size_t m_dims[] = {d, 5, c};
      const model::Classifier m(model::make_stack(m_dims, diff::Activation::Sigmoid, rng(), "M"));
      const std::size_t d_dims[] = {d + c, 5, 1};
      const model::Discriminator disc(model::make_stack(d_dims, diff::Activation::Sigmoid, rng(), "D"), c);
      const Tensor z = random_tensor({4, gd.latent}, Domain::Any, rng);
      const std::vector<int> labels = {0, 1, 1, 0};
      auto loss = [&](Tape& tape, Mode mode) {
        const Var gen = g.generate(tape, tape.borrow(z), labels, mode);
        return model::generator_loss(v, m.forward(tape, gen, Mode::Frozen),
                                     disc.forward(tape, gen, labels, Mode::Frozen), labels);
      };
      worst = std::max(worst, check_parameters(g.parameters(), loss, opt.inject_gradient_fault));
    }
    out.push_back(below("grad/convex_generator_" + std::string(model::to_string(v)), worst, kGradRelTol,
                        std::to_string(instances) + " instances"));
  }
  return out;
}

CheckResult convexity_check(const OracleOptions& opt, std::size_t calls) {
  Rng rng(opt.seed + 1);
  const std::size_t c = 4, d = 6;
  std::vector<Tensor> xs = {random_tensor({5, d}, Domain::Any, rng), random_tensor({9, d}, Domain::Any, rng),
                            random_tensor({17, d}, Domain::Any, rng)};
  const auto g = model::make_convex_generator({8, 12, 16}, xs, c, rng());
  std::uniform_int_distribution<int> pick(0, static_cast<int>(c) - 2);
  double min_w = std::numeric_limits<double>::infinity();
  double sum_err = 0.0, recon_err = 0.0;
  for (std::size_t k = 0; k < calls; ++k) {
    const int i = pick(rng);
    const Tensor z = random_tensor({1, 8}, Domain::Any, rng);
    const Tensor w = g.weights(z, i);
    const std::vector<int> label = {i};
    const Tensor out = g.generate(z, label);
    const Tensor& x = xs[static_cast<std::size_t>(i)];
    double s = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) {
      min_w = std::min(min_w, w(0, j));
      s += w(0, j);
    }
    sum_err = std::max(sum_err, std::abs(s - 1.0));
    for (std::size_t col = 0; col < d; ++col) {
      double r = 0.0;
      for (std::size_t j = 0; j < w.cols(); ++j) r += w(0, j) * x(j, col);
      recon_err = std::max(recon_err, std::abs(r - out(0, col)));
    }
  }
  CheckResult res;
  res.name = "convexity";
  res.measured = std::max(sum_err, recon_err);
  res.tolerance = kSimplexTol;
  res.passed = min_w >= -kNegativeWeightTol && sum_err <= kSimplexTol && recon_err <= kSimplexTol;
  res.detail = std::to_string(calls) + " calls, min weight " + fmt(min_w) + ", |sum-1| " + fmt(sum_err) +
               ", reconstruction " + fmt(recon_err);
  return res;
}

std::vector<CheckResult> loss_checks(const OracleOptions& opt, std::size_t batches) {
  Rng rng(opt.seed + 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto probs = [&](std::size_t rows, std::size_t cols) {
    Tensor t = Tensor::matrix(rows, cols);
    for (auto& v : t.values()) {
      const double e = u(rng);
      v = e < 0.03 ? 1e-14 : e > 0.97 ? 1.0 - 1e-14 : u(rng) * 0.998 + 0.001;
    }
    return t;
  };
  std::vector<CheckResult> out;
  for (auto v : kVariants) {
    double w_cls = 0.0, w_gm = 0.0, w_gd = 0.0, w_dr = 0.0, w_df = 0.0;
    for (std::size_t k = 0; k < batches; ++k) {
      const std::size_t b = std::uniform_int_distribution<std::size_t>(1, 16)(rng);
      const std::size_t c = std::uniform_int_distribution<std::size_t>(2, 6)(rng);
      const Tensor m = probs(b, c);
      const Tensor d = probs(b, 1);
      std::vector<int> y(b), minority(b);
      for (std::size_t r = 0; r < b; ++r) {
        y[r] = std::uniform_int_distribution<int>(0, static_cast<int>(c) - 1)(rng);
        minority[r] = std::uniform_int_distribution<int>(0, static_cast<int>(c) - 2)(rng);
      }
      Tape tape;
      const Var mv = tape.constant(m), dv = tape.constant(d);
      w_cls = std::max(w_cls, std::abs(model::classifier_loss(v, mv, y).value().item() - naive_classifier_loss(v, m, y)));
      w_gm = std::max(w_gm, std::abs(model::generator_loss_vs_classifier(v, mv, minority).value().item() -
                                     naive_generator_loss_vs_classifier(v, m, minority)));
      w_gd = std::max(w_gd, std::abs(model::generator_loss_vs_discriminator(v, dv).value().item() -
                                     naive_generator_loss_vs_discriminator(v, d)));
      w_dr = std::max(w_dr, std::abs(model::discriminator_loss(v, dv, true).value().item() -
                                     naive_discriminator_loss(v, d, true)));
      w_df = std::max(w_df, std::abs(model::discriminator_loss(v, dv, false).value().item() -
                                     naive_discriminator_loss(v, d, false)));
    }
    const std::string tag(model::to_string(v));
    const std::string n = std::to_string(batches) + " batches";
    out.push_back(at_most("loss/" + tag + "/classifier", w_cls, kLossTol, n));
    out.push_back(at_most("loss/" + tag + "/generator_vs_M", w_gm, kLossTol, n));
    out.push_back(at_most("loss/" + tag + "/generator_vs_D", w_gd, kLossTol, n));
    out.push_back(at_most("loss/" + tag + "/discriminator_real", w_dr, kLossTol, n));
    out.push_back(at_most("loss/" + tag + "/discriminator_fake", w_df, kLossTol, n));
  }
  return out;
}

std::vector<CheckResult> optimal_classifier_checks(const OracleOptions& opt, std::size_t instances,
                                                   std::size_t candidates) {
  Rng rng(opt.seed + 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t violations = 0;
  double worst_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < instances; ++k) {
    const auto s = random_set(3, 5, rng);
    const auto mstar = eval::optimal_classifier(s);
    const double pc = s.priors.back();
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t x = 0; x < s.support; ++x) {
        double a = s.priors[i] * s.real[i][x] + (pc - s.priors[i]) * s.generated[i][x];
        double b = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
          if (j != i) b += s.priors[j] * s.real[j][x] + (pc - s.priors[j]) * s.generated[j][x];
        }
        if (a + b == 0.0) continue;
        auto f = [&](double mv) {
          return (a > 0.0 ? a * std::log(mv) : 0.0) + (b > 0.0 ? b * std::log(1.0 - mv) : 0.0);
        };
        const double numeric = golden_section_max(f, 1e-13, 1.0 - 1e-13);
        worst = std::max(worst, std::abs(numeric - mstar[i][x]));
      }
    }
    const double jstar = naive_objective(s, mstar);
    for (std::size_t r = 0; r < candidates; ++r) {
      eval::ClassifierTable m(3, std::vector<double>(s.support));
      for (auto& row : m)
        for (auto& v : row) v = u(rng);
      const double gap = jstar - naive_objective(s, m);
      worst_gap = std::min(worst_gap, gap);
      if (gap < 0.0) ++violations;
    }
  }
  return {below("optimal_M/closed_form_vs_golden_section", worst, kOptimalMTol,
                std::to_string(instances) + " instances, 3 classes, support 5"),
          at_most("optimal_M/dominates_random", static_cast<double>(violations), 0.0,
                  std::to_string(instances * candidates) + " candidates, smallest margin " + fmt(worst_gap))};
}

namespace {

struct Spread {
  double variance = 0.0;
  double mean = 0.0;
};

Spread theorem_spread(const OracleOptions& opt, std::size_t draws, bool weighted) {
  Rng rng(opt.seed + 4);
  auto s = random_set(3, 5, rng);
  std::vector<double> diffs;
  for (std::size_t k = 0; k < draws; ++k) {
    for (auto& g : s.generated) g = random_simplex(s.support, rng, 0.2);
    const auto terms = eval::theorem1_terms(s);
    const double jstar = naive_objective(s, eval::optimal_classifier(s));
    diffs.push_back(jstar - (weighted ? terms.mass_weighted_sum : terms.sum));
  }
  Spread out;
  for (double d : diffs) out.mean += d;
  out.mean /= static_cast<double>(diffs.size());
  for (double d : diffs) out.variance += (d - out.mean) * (d - out.mean);
  out.variance /= static_cast<double>(diffs.size());
  return out;
}

}  // namespace

CheckResult theorem1_check(const OracleOptions& opt, std::size_t draws) {
  const auto sp = theorem_spread(opt, draws, true);
  // Masses are P_c and (c-1) P_c for every class, so the constant is
  // c P_c [ln(1/c) + (c-1) ln((c-1)/c)].
  Rng rng(opt.seed + 4);
  const auto s = random_set(3, 5, rng);
  const double c = 3.0, pc = s.priors.back();
  const double expected = c * pc * (std::log(1.0 / c) + (c - 1.0) * std::log((c - 1.0) / c));
  const double off = std::abs(sp.mean - expected);
  CheckResult r = below("js_sum/constant_offset", sp.variance, kTheoremVarianceTol);
  r.passed = r.passed && off < 1e-9;
  r.detail = std::to_string(draws) + " generated draws, variance " + fmt(sp.variance) + ", offset " +
             fmt(sp.mean) + " vs derived " + fmt(expected);
  return r;
}

CheckResult theorem1_plain_sum_spread(const OracleOptions& opt, std::size_t draws) {
  const auto sp = theorem_spread(opt, draws, false);
  CheckResult r = below("js_sum/plain_sum_spread", sp.variance, kTheoremVarianceTol);
  r.detail = "equal-weight JS sum; only affine-equivalent for two classes";
  return r;
}

CheckResult smote_segment_check(const OracleOptions& opt) {
  Rng rng(opt.seed + 5);
  const std::size_t d = 5;
  const std::size_t sizes[] = {40, 150, 600};
  std::vector<int> labels;
  std::vector<double> values;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t r = 0; r < sizes[i]; ++r) {
      labels.push_back(static_cast<int>(i));
      for (std::size_t j = 0; j < d; ++j) values.push_back(normal(rng) + 2.0 * static_cast<double>(i));
    }
  }
  const auto data = data::Dataset::from_source_labels(Tensor({labels.size(), d}, values), labels);
  const auto aug = baselines::smote_oversample(data, {}, rng);

  double worst = 0.0;
  std::size_t synthetic = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const Tensor x = data.class_matrix(i);
    const std::size_t n = x.rows();
    std::vector<std::vector<std::size_t>> knn(n);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<std::pair<double, std::size_t>> dist;
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += (x(a, j) - x(b, j)) * (x(a, j) - x(b, j));
        dist.push_back({s, b});
      }
      std::sort(dist.begin(), dist.end());
      for (std::size_t q = 0; q < 5; ++q) knn[a].push_back(dist[q].second);
    }
    for (std::size_t row = data.size(); row < aug.size(); ++row) {
      if (aug.labels()[row] != static_cast<int>(i)) continue;
      ++synthetic;
      const auto p = aug.features().row(row);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < n && best > 0.0; ++a) {
        for (std::size_t b : knn[a]) {
          double num = 0.0, den = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            num += (p[j] - x(a, j)) * (x(b, j) - x(a, j));
            den += (x(b, j) - x(a, j)) * (x(b, j) - x(a, j));
          }
          const double t = den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0;
          double s = 0.0;
          for (std::size_t j = 0; j < d; ++j) {
            const double q = x(a, j) + t * (x(b, j) - x(a, j));
            s += (p[j] - q) * (p[j] - q);
          }
          best = std::min(best, std::sqrt(s));
        }
      }
      worst = std::max(worst, best);
    }
  }
  return at_most("smote/segment", worst, kSegmentTol,
                 std::to_string(synthetic) + " synthetic points, brute-force 5-NN over " +
                     std::to_string(data.size()) + " rows");
}

std::vector<CheckResult> label_frequency_checks(const OracleOptions& opt, std::size_t draws) {
  Rng rng(opt.seed + 6);
  std::vector<CheckResult> out;
  {
    const double priors[] = {0.2, 0.3, 0.5};
    const auto labels = train::assign_fake_labels(priors, draws, rng);
    double f0 = 0.0, f1 = 0.0, other = 0.0;
    for (int l : labels) (l == 0 ? f0 : l == 1 ? f1 : other) += 1.0;
    const double n = static_cast<double>(draws);
    const double err = std::max(std::abs(f0 / n - 0.6), std::abs(f1 / n - 0.4));
    CheckResult r = at_most("labels/fake_prop_to_prior_gap", err, kFrequencyTol,
                            "observed (" + fmt(f0 / n) + ", " + fmt(f1 / n) + ") vs (0.6, 0.4)");
    r.passed = r.passed && other == 0.0;
    out.push_back(r);
  }
  {
    const auto labels = train::assign_uniform_labels(3, draws, rng);
    double f0 = 0.0, f1 = 0.0, other = 0.0;
    for (int l : labels) (l == 0 ? f0 : l == 1 ? f1 : other) += 1.0;
    const double n = static_cast<double>(draws);
    const double err = std::max(std::abs(f0 / n - 0.5), std::abs(f1 / n - 0.5));
    CheckResult r = at_most("labels/uniform_minority", err, kFrequencyTol,
                            "observed (" + fmt(f0 / n) + ", " + fmt(f1 / n) + ") vs (0.5, 0.5)");
    r.passed = r.passed && other == 0.0;
    out.push_back(r);
  }
  {
    const double priors[] = {0.1, 0.9};
    const auto a = train::assign_fake_labels(priors, 1000, rng);
    const auto b = train::assign_uniform_labels(2, 1000, rng);
    const double bad = static_cast<double>(std::count_if(a.begin(), a.end(), [](int l) { return l != 0; }) +
                                           std::count_if(b.begin(), b.end(), [](int l) { return l != 0; }));
    out.push_back(at_most("labels/two_class_single_minority", bad, 0.0));
  }
  return out;
}

std::vector<CheckResult> metric_checks(const OracleOptions& opt, std::size_t matrices) {
  Rng rng(opt.seed + 7);
  std::uniform_int_distribution<int> count(0, 50);
  double acsa_diff = 0.0, gm_diff = 0.0, zero_gm = 0.0, order_violation = 0.0;
  for (std::size_t k = 0; k < matrices; ++k) {
    const std::size_t c = std::uniform_int_distribution<std::size_t>(2, 10)(rng);
    const bool force_zero = k % 4 == 0;
    const std::size_t zero_class = std::uniform_int_distribution<std::size_t>(0, c - 1)(rng);
    eval::ConfusionMatrix cm(c);
    for (std::size_t t = 0; t < c; ++t) {
      for (std::size_t p = 0; p < c; ++p) {
        int v = count(rng);
        if (force_zero && t == zero_class && p == t) v = 0;
        if (t == p && v == 0 && !(force_zero && t == zero_class)) v = 1;
        cm.add(static_cast<int>(t), static_cast<int>(p), static_cast<std::uint64_t>(v));
      }
      if (cm.row_sum(t) == 0) cm.add(static_cast<int>(t), static_cast<int>((t + 1) % c));
    }
    const double a = eval::acsa(cm), g = eval::gm(cm);
    acsa_diff = std::max(acsa_diff, std::abs(a - naive_acsa(cm)));
    gm_diff = std::max(gm_diff, std::abs(g - naive_gm(cm)));
    if (force_zero) zero_gm = std::max(zero_gm, std::abs(g));
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * a;
    if (g > a + slack) order_violation += 1.0;
  }
  const std::string n = std::to_string(matrices) + " random confusion matrices";
  return {at_most("metrics/acsa_exact", acsa_diff, 0.0, n), at_most("metrics/gm_exact", gm_diff, 0.0, n),
          at_most("metrics/gm_zero_on_zero_recall", zero_gm, 0.0, n),
          at_most("metrics/gm_le_acsa", order_violation, 0.0, n)};
}

std::vector<CheckResult> run_all(const OracleOptions& opt) {
  std::vector<CheckResult> out;
  auto append = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  append(gradient_checks(opt));
  out.push_back(convexity_check(opt));
  append(loss_checks(opt));
  append(optimal_classifier_checks(opt));
  out.push_back(theorem1_check(opt));
  out.push_back(smote_segment_check(opt));
  append(label_frequency_checks(opt));
  append(metric_checks(opt));
  return out;
}

}  // namespace gamo::oracle
