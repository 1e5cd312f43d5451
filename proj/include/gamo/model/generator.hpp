#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gamo/model/networks.hpp"

namespace gamo::model {

enum class GeneratorKind { None, Dense, Convex };

std::string_view to_string(GeneratorKind k);

// G(z | i) for minority classes i < c-1.
class Generator {
 public:
  virtual ~Generator() = default;

  // z is b x l; labels holds one minority class per row.
  virtual Var generate(Tape& tape, Var z, std::span<const int> labels, Mode mode) const = 0;
  Tensor generate(const Tensor& z, std::span<const int> labels) const;

  virtual GeneratorKind kind() const noexcept = 0;
  virtual std::vector<Parameter*> parameters() = 0;
  virtual std::vector<const Parameter*> parameters() const = 0;
  virtual std::unique_ptr<Generator> clone() const = 0;

  std::size_t latent_dim() const noexcept { return latent_; }
  std::size_t classes() const noexcept { return classes_; }
  std::size_t output_dim() const noexcept { return output_dim_; }
  std::size_t parameter_count() const;

 protected:
  Generator(std::size_t latent, std::size_t classes, std::size_t output_dim)
      : latent_(latent), classes_(classes), output_dim_(output_dim) {}
  // Checks z width and that every label is a minority class.
  void check_inputs(const Var& z, std::span<const int> labels) const;

 private:
  std::size_t latent_;
  std::size_t classes_;
  std::size_t output_dim_;
};

// cTMU maps z (+) onehot(i) to an m-dim transient vector; IGU_i maps that to
// n_i softmax weights over the rows of X_i, and the sample is weights . X_i.
class ConvexGenerator final : public Generator {
 public:
  ConvexGenerator(Mlp ctmu, std::vector<Mlp> igus, std::vector<Tensor> class_data);

  Var generate(Tape& tape, Var z, std::span<const int> labels, Mode mode) const override;
  using Generator::generate;
  // Convex weights of IGU_i for every row of z (untraced), |z| x n_i.
  Tensor weights(const Tensor& z, int class_id) const;

  GeneratorKind kind() const noexcept override { return GeneratorKind::Convex; }
  std::vector<Parameter*> parameters() override;
  std::vector<const Parameter*> parameters() const override;
  std::unique_ptr<Generator> clone() const override { return std::make_unique<ConvexGenerator>(*this); }

  const Mlp& ctmu() const noexcept { return ctmu_; }
  Mlp& ctmu() noexcept { return ctmu_; }
  const std::vector<Mlp>& igus() const noexcept { return igus_; }
  std::vector<Mlp>& igus() noexcept { return igus_; }
  const Tensor& class_data(std::size_t i) const { return class_data_.at(i); }
  // Replaces X_i (e.g. after F moved); row counts must stay n_i.
  void set_class_data(std::vector<Tensor> class_data);

 private:
  Mlp ctmu_;
  std::vector<Mlp> igus_;
  std::vector<Tensor> class_data_;
};

// Unconstrained conditional generator: z (+) onehot(i) -> feature space.
class DenseGenerator final : public Generator {
 public:
  DenseGenerator(Mlp net, std::size_t classes);

  Var generate(Tape& tape, Var z, std::span<const int> labels, Mode mode) const override;
  using Generator::generate;

  GeneratorKind kind() const noexcept override { return GeneratorKind::Dense; }
  std::vector<Parameter*> parameters() override { return net_.parameters(); }
  std::vector<const Parameter*> parameters() const override { return std::as_const(net_).parameters(); }
  std::unique_ptr<Generator> clone() const override { return std::make_unique<DenseGenerator>(*this); }

  const Mlp& net() const noexcept { return net_; }

 private:
  Mlp net_;
};

struct GeneratorDims {
  std::size_t latent = 32;
  std::size_t transient = 64;  // m
  std::size_t hidden = 128;
};

ConvexGenerator make_convex_generator(const GeneratorDims& dims, std::vector<Tensor> class_data,
                                      std::size_t classes, std::uint64_t seed);
// Dense [l+c, h, h, D] with h chosen so the parameter count is as close as
// possible to `target_parameters` (hidden = dims.hidden when target is 0).
DenseGenerator make_dense_generator(const GeneratorDims& dims, std::size_t output_dim, std::size_t classes,
                                    std::size_t target_parameters, std::uint64_t seed);

// Parameter hash over every generator array, in registry order.
std::uint64_t parameter_hash(const Generator& g);

}  // namespace gamo::model
