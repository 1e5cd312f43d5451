#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gamo/data/dataset.hpp"
#include "gamo/diffcore/checkpoint.hpp"
#include "gamo/model/generator.hpp"
#include "gamo/model/networks.hpp"

namespace gamo::model {

struct ModelConfig {
  std::size_t input_dim = 0;
  std::size_t classes = 0;
  GeneratorDims generator;
  std::size_t hidden = 128;      // hidden width of M and D
  std::size_t feature_dim = 0;   // 0 keeps F as the identity
  GeneratorKind generator_kind = GeneratorKind::Convex;
  bool discriminator = true;
  // Dense generators are sized to the convex generator's parameter count.
  bool match_convex_capacity = true;
  LossVariant loss = LossVariant::LeastSquares;
  std::uint64_t seed = 0;
  std::string variant = "GAMO";
};

// {F, M, D, G} plus the training class matrices the convex generator draws
// from. Copying deep-copies every network.
class GamoModel {
 public:
  static GamoModel create(const ModelConfig& config, const data::Dataset& train);

  GamoModel(const GamoModel& other);
  GamoModel& operator=(const GamoModel& other);
  GamoModel(GamoModel&&) noexcept = default;
  GamoModel& operator=(GamoModel&&) noexcept = default;
  ~GamoModel() = default;

  const ModelConfig& config() const noexcept { return config_; }
  std::size_t classes() const noexcept { return config_.classes; }
  std::size_t feature_dim() const;

  FeatureExtractor& extractor() noexcept { return f_; }
  const FeatureExtractor& extractor() const noexcept { return f_; }
  Classifier& classifier() noexcept { return m_; }
  const Classifier& classifier() const noexcept { return m_; }
  bool has_discriminator() const noexcept { return d_.has_value(); }
  Discriminator& discriminator();
  const Discriminator& discriminator() const;
  bool has_generator() const noexcept { return g_ != nullptr; }
  Generator& generator();
  const Generator& generator() const;

  // F applied to raw inputs.
  Tensor features(const Tensor& raw) const { return f_.forward(raw); }
  std::vector<int> predict(const Tensor& raw) const { return model::predict(m_, features(raw)); }

  // Raw training matrix of class i (all c classes are kept).
  const Tensor& class_data(std::size_t i) const { return class_data_.at(i); }
  std::vector<std::size_t> class_sizes() const;
  const std::vector<int>& class_labels() const noexcept { return class_labels_; }
  // Re-derives the convex generator's X_i as F(raw X_i).
  void refresh_generator_data();

  bool trained() const noexcept { return trained_; }
  void set_trained(bool t) noexcept { trained_ = t; }

  // Every parameter of F, M, D and G, in that order.
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  std::uint64_t hash() const;

  nlohmann::json manifest() const;
  diff::Checkpoint to_checkpoint() const;
  static GamoModel from_checkpoint(const diff::Checkpoint& ckpt);
  void save(const std::filesystem::path& path) const;
  static GamoModel load(const std::filesystem::path& path);

  // Overwrites parameter values from a checkpoint by name; shapes must match.
  void load_parameters(const diff::Checkpoint& ckpt);

 private:
  GamoModel() = default;

  ModelConfig config_;
  FeatureExtractor f_;
  Classifier m_;
  std::optional<Discriminator> d_;
  std::unique_ptr<Generator> g_;
  std::vector<Tensor> class_data_;
  std::vector<int> class_labels_;
  bool trained_ = false;
};

}  // namespace gamo::model
