#include "gamo/baselines/variants.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "gamo/baselines/export.hpp"
#include "gamo/error.hpp"

namespace gamo::baselines {

using model::GeneratorKind;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::CN: return "CN";
    case Variant::SMOTE_CN: return "SMOTE_CN";
    case Variant::CGAN_CN: return "CGAN_CN";
    case Variant::CG_CN: return "CG_CN";
    case Variant::CG_D_CN: return "CG_D_CN";
    case Variant::GAMO_NO_D: return "GAMO_NO_D";
    case Variant::GAMO: return "GAMO";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char ch) { return std::toupper(ch); });
  if (up == "GAMO\\D") return Variant::GAMO_NO_D;
  for (auto v : kAllVariants) {
    if (up == to_string(v)) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) +
                    "' (known: CN, SMOTE_CN, CGAN_CN, CG_CN, CG_D_CN, GAMO_NO_D, GAMO)");
}

VariantToggles toggles(Variant v) {
  switch (v) {
    case Variant::CN: return {};
    case Variant::SMOTE_CN: return {GeneratorKind::None, false, false, Oversampling::Smote};
    case Variant::CGAN_CN: return {GeneratorKind::Dense, true, false, Oversampling::PretrainedCgan};
    case Variant::CG_CN: return {GeneratorKind::Dense, false, true, Oversampling::Adversarial};
    case Variant::CG_D_CN: return {GeneratorKind::Dense, true, true, Oversampling::Adversarial};
    case Variant::GAMO_NO_D: return {GeneratorKind::Convex, false, true, Oversampling::Adversarial};
    case Variant::GAMO: return {GeneratorKind::Convex, true, true, Oversampling::Adversarial};
  }
  return {};
}

Variant variant_from_toggles(const VariantToggles& t) {
  for (auto v : kAllVariants) {
    const auto u = toggles(v);
    if (u.generator == t.generator && u.discriminator == t.discriminator &&
        u.classifier_adversarial == t.classifier_adversarial && u.oversampling == t.oversampling) {
      return v;
    }
  }
  throw ConfigError("no ablation variant has this combination of components");
}

model::ModelConfig model_config(Variant v, const data::Dataset& train, const ExperimentConfig& cfg) {
  const auto t = toggles(v);
  model::ModelConfig mc;
  mc.input_dim = train.dim();
  mc.classes = train.class_count();
  mc.generator = cfg.generator;
  mc.hidden = cfg.hidden;
  mc.feature_dim = cfg.feature_dim;
  mc.loss = cfg.train.loss;
  mc.seed = cfg.train.seed;
  mc.variant = std::string(to_string(v));
  if (t.oversampling == Oversampling::Adversarial) {
    mc.generator_kind = t.generator;
    mc.discriminator = t.discriminator;
  } else {
    mc.generator_kind = GeneratorKind::None;
    mc.discriminator = false;
  }
  return mc;
}

VariantRun train_variant(Variant v, const data::Dataset& train, const data::Dataset& test,
                         const ExperimentConfig& cfg) {
  const auto t = toggles(v);
  const auto split = train::split_for_training(train, cfg.train);
  std::mt19937_64 rng(model::mix_seed(cfg.train.seed, 21));

  std::optional<data::Dataset> augmented;
  if (t.oversampling == Oversampling::Smote) {
    augmented = smote_oversample(split.fit, cfg.smote, rng);
  } else if (t.oversampling == Oversampling::PretrainedCgan) {
    // stand-alone cGAN on raw rows: G vs D only, M never touches G
    auto gc = model_config(v, split.fit, cfg);
    gc.generator_kind = GeneratorKind::Dense;
    gc.discriminator = true;
    gc.feature_dim = 0;
    gc.variant = "CGAN";
    auto cgan = model::GamoModel::create(gc, split.fit);
    auto cc = cfg.train;
    cc.train_classifier = false;
    cc.classifier_adversarial = false;
    if (cfg.cgan_epochs > 0) cc.epochs = cfg.cgan_epochs;
    train::train(cgan, {split.fit, std::nullopt}, cc);
    augmented = append_synthetic(split.fit, generate_balancing_samples(cgan, rng));
  }

  const auto& fit = augmented ? *augmented : split.fit;
  auto model = model::GamoModel::create(model_config(v, fit, cfg), fit);
  auto tc = cfg.train;
  tc.classifier_adversarial = t.classifier_adversarial;
  auto state = train::train(model, {fit, split.validation}, tc);
  state.optimizers.reset();
  auto report = train::evaluate(model, test, cfg.train.seed);
  return VariantRun{std::move(model), std::move(state), std::move(report), split.fit, std::move(augmented),
                    split.fit.size()};
}

}  // namespace gamo::baselines
