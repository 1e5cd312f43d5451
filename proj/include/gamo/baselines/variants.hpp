#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "gamo/baselines/smote.hpp"
#include "gamo/evalor/metrics.hpp"
#include "gamo/model/gamo_model.hpp"
#include "gamo/trainer/trainer.hpp"

namespace gamo::baselines {

enum class Variant { CN, SMOTE_CN, CGAN_CN, CG_CN, CG_D_CN, GAMO_NO_D, GAMO };

inline constexpr Variant kAllVariants[] = {Variant::CN,    Variant::SMOTE_CN,  Variant::CGAN_CN, Variant::CG_CN,
                                           Variant::CG_D_CN, Variant::GAMO_NO_D, Variant::GAMO};

std::string_view to_string(Variant v);
// Accepts the tags above (case-insensitive); "GAMO\D" is an alias of GAMO_NO_D.
Variant parse_variant(std::string_view name);

// How a variant obtains extra minority rows.
enum class Oversampling { None, Smote, PretrainedCgan, Adversarial };

struct VariantToggles {
  model::GeneratorKind generator = model::GeneratorKind::None;
  bool discriminator = false;
  bool classifier_adversarial = false;
  Oversampling oversampling = Oversampling::None;
};

VariantToggles toggles(Variant v);
// Inverse of toggles(); throws ConfigError for a combination with no tag.
Variant variant_from_toggles(const VariantToggles& t);

struct ExperimentConfig {
  model::GeneratorDims generator;
  std::size_t hidden = 128;
  std::size_t feature_dim = 0;
  train::TrainConfig train;
  SmoteConfig smote;
  // Epochs of the stand-alone cGAN for CGAN_CN; 0 reuses train.epochs.
  std::size_t cgan_epochs = 0;
};

model::ModelConfig model_config(Variant v, const data::Dataset& train, const ExperimentConfig& cfg);

struct VariantRun {
  model::GamoModel model;  // the classifier-bearing model
  train::RunState state;
  eval::EvalReport report;
  // Real rows M was fitted on (training set minus the validation holdout).
  data::Dataset fit;
  // Training rows actually seen by M when oversampling happened up front
  // (SMOTE_CN, CGAN_CN); rows past `original_rows` are synthetic.
  std::optional<data::Dataset> augmented;
  std::size_t original_rows = 0;
};

// Trains one rung of the ablation ladder on `train` and scores it on `test`.
VariantRun train_variant(Variant v, const data::Dataset& train, const data::Dataset& test, const ExperimentConfig& cfg);

}  // namespace gamo::baselines
