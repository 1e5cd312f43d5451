#include "gamo/model/generator.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "gamo/diffcore/ops.hpp"
#include "gamo/error.hpp"

namespace gamo::model {

std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::None: return "none";
    case GeneratorKind::Dense: return "dense";
    case GeneratorKind::Convex: return "convex";
  }
  return "?";
}

Tensor Generator::generate(const Tensor& z, std::span<const int> labels) const {
  Tape tape;
  return generate(tape, tape.borrow(z), labels, Mode::Frozen).value();
}

std::size_t Generator::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->value.size();
  return n;
}

void Generator::check_inputs(const Var& z, std::span<const int> labels) const {
  if (z.cols() != latent_) {
    throw ShapeError("generator expects latent dim " + std::to_string(latent_) + ", got " + std::to_string(z.cols()));
  }
  if (labels.size() != z.rows()) throw ShapeError("generator: one class label per latent row required");
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) + 1 >= classes_) {
      throw ConfigError("generator: class " + std::to_string(l) + " is not a minority class (c = " +
                        std::to_string(classes_) + ")");
    }
  }
}

ConvexGenerator::ConvexGenerator(Mlp ctmu, std::vector<Mlp> igus, std::vector<Tensor> class_data)
    : Generator(ctmu.in_dim() - (igus.size() + 1), igus.size() + 1,
                class_data.empty() ? 0 : class_data.front().cols()),
      ctmu_(std::move(ctmu)),
      igus_(std::move(igus)) {
  if (igus_.empty()) throw ConfigError("convex generator needs at least one minority class");
  if (ctmu_.in_dim() <= classes()) throw ConfigError("cTMU input must hold the latent vector plus a one-hot class");
  for (std::size_t i = 0; i < igus_.size(); ++i) {
    if (igus_[i].in_dim() != ctmu_.out_dim()) {
      throw ShapeError("IGU " + std::to_string(i) + " input does not match the cTMU output");
    }
    if (igus_[i].activations().back() != diff::Activation::Softmax) {
      throw ConfigError("IGU " + std::to_string(i) + " must end in softmax");
    }
  }
  set_class_data(std::move(class_data));
}

void ConvexGenerator::set_class_data(std::vector<Tensor> class_data) {
  if (class_data.size() != igus_.size()) {
    throw ShapeError("convex generator has " + std::to_string(igus_.size()) + " IGUs but " +
                     std::to_string(class_data.size()) + " class matrices");
  }
  for (std::size_t i = 0; i < class_data.size(); ++i) {
    if (class_data[i].rows() != igus_[i].out_dim()) {
      throw ShapeError("X_" + std::to_string(i) + " has " + std::to_string(class_data[i].rows()) +
                       " rows but IGU emits " + std::to_string(igus_[i].out_dim()) + " weights");
    }
    if (class_data[i].cols() != output_dim()) throw ShapeError("class matrices disagree on feature dimension");
  }
  class_data_ = std::move(class_data);
}

Var ConvexGenerator::generate(Tape& tape, Var z, std::span<const int> labels, Mode mode) const {
  check_inputs(z, labels);
  const Var cond = tape.constant(one_hot(labels, classes()));
  const Var t = ctmu_.forward(tape, diff::concat_cols(z, cond), mode);

  std::vector<Var> parts;
  std::vector<std::size_t> order;
  order.reserve(labels.size());
  for (std::size_t i = 0; i < igus_.size(); ++i) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < labels.size(); ++r) {
      if (static_cast<std::size_t>(labels[r]) == i) rows.push_back(r);
    }
    if (rows.empty()) continue;
    const Var w = igus_[i].forward(tape, diff::row_select(t, rows), mode);
    parts.push_back(diff::matmul(w, tape.borrow(class_data_[i])));
    order.insert(order.end(), rows.begin(), rows.end());
  }
  if (parts.empty()) return tape.constant(Tensor::matrix(0, output_dim()));
  const Var grouped = parts.size() == 1 ? parts.front() : diff::concat_rows(parts);

  // grouped row k holds the sample for original row order[k]
  std::vector<std::size_t> inverse(order.size());
  bool sorted = true;
  for (std::size_t k = 0; k < order.size(); ++k) {
    inverse[order[k]] = k;
    sorted = sorted && order[k] == k;
  }
  return sorted ? grouped : diff::row_select(grouped, inverse);
}

Tensor ConvexGenerator::weights(const Tensor& z, int class_id) const {
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= igus_.size()) {
    throw ConfigError("no IGU for class " + std::to_string(class_id));
  }
  const std::vector<int> labels(z.rows(), class_id);
  Tensor in = Tensor::matrix(z.rows(), z.cols() + classes());
  const Tensor cond = one_hot(labels, classes());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    for (std::size_t j = 0; j < z.cols(); ++j) in(r, j) = z(r, j);
    for (std::size_t j = 0; j < classes(); ++j) in(r, z.cols() + j) = cond(r, j);
  }
  return igus_[static_cast<std::size_t>(class_id)].forward(ctmu_.forward(in));
}

std::vector<Parameter*> ConvexGenerator::parameters() {
  auto out = ctmu_.parameters();
  for (auto& igu : igus_) {
    const auto p = igu.parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

std::vector<const Parameter*> ConvexGenerator::parameters() const {
  auto out = std::as_const(ctmu_).parameters();
  for (const auto& igu : igus_) {
    const auto p = igu.parameters();
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

DenseGenerator::DenseGenerator(Mlp net, std::size_t classes)
    : Generator(net.in_dim() > classes ? net.in_dim() - classes : 0, classes, net.out_dim()), net_(std::move(net)) {
  if (latent_dim() == 0) throw ConfigError("dense generator input must hold the latent vector plus a one-hot class");
}

Var DenseGenerator::generate(Tape& tape, Var z, std::span<const int> labels, Mode mode) const {
  check_inputs(z, labels);
  const Var cond = tape.constant(one_hot(labels, classes()));
  return net_.forward(tape, diff::concat_cols(z, cond), mode);
}

ConvexGenerator make_convex_generator(const GeneratorDims& dims, std::vector<Tensor> class_data,
                                      std::size_t classes, std::uint64_t seed) {
  if (class_data.size() + 1 != classes) throw ConfigError("convex generator needs one matrix per minority class");
  const std::size_t ctmu_dims[] = {dims.latent + classes, dims.hidden, dims.transient};
  Mlp ctmu = make_stack(ctmu_dims, diff::Activation::Relu, mix_seed(seed, 100), "G/ctmu");
  std::vector<Mlp> igus;
  for (std::size_t i = 0; i < class_data.size(); ++i) {
    const std::size_t igu_dims[] = {dims.transient, class_data[i].rows()};
    igus.push_back(make_stack(igu_dims, diff::Activation::Softmax, mix_seed(seed, 101 + i),
                              "G/igu" + std::to_string(i)));
  }
  return ConvexGenerator(std::move(ctmu), std::move(igus), std::move(class_data));
}

namespace {

std::size_t dense_count(std::size_t in, std::size_t h, std::size_t out) {
  return in * h + h + h * h + h + h * out + out;
}

}  // namespace

DenseGenerator make_dense_generator(const GeneratorDims& dims, std::size_t output_dim, std::size_t classes,
                                    std::size_t target_parameters, std::uint64_t seed) {
  const std::size_t in = dims.latent + classes;
  std::size_t h = dims.hidden;
  if (target_parameters > 0) {
    h = 1;
    auto gap = [&](std::size_t x) {
      const double d = static_cast<double>(dense_count(in, x, output_dim)) - static_cast<double>(target_parameters);
      return std::abs(d);
    };
    for (std::size_t x = 2; dense_count(in, x - 1, output_dim) < target_parameters; ++x) {
      if (gap(x) < gap(h)) h = x;
    }
  }
  const std::size_t net_dims[] = {in, h, h, output_dim};
  return DenseGenerator(make_stack(net_dims, diff::Activation::Identity, mix_seed(seed, 200), "G/dense"), classes);
}

std::uint64_t parameter_hash(const Generator& g) {
  const auto params = g.parameters();
  return diff::parameter_hash(params);
}

}  // namespace gamo::model
