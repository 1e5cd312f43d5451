#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamo/data/dataset.hpp"
#include "gamo/diffcore/checkpoint.hpp"
#include "gamo/diffcore/optimizer.hpp"
#include "gamo/evalor/metrics.hpp"
#include "gamo/model/gamo_model.hpp"
#include "gamo/trainer/sampling.hpp"

namespace gamo::train {

using data::Dataset;
using model::GamoModel;
using model::LossVariant;

struct TrainConfig {
  LossVariant loss = LossVariant::LeastSquares;
  std::size_t batch = 32;
  // Inner step counts; unset means ceil(n / batch).
  std::optional<std::size_t> u;
  std::optional<std::size_t> v;
  std::size_t epochs = 50;
  diff::OptimizerConfig opt_f;
  diff::OptimizerConfig opt_m;
  diff::OptimizerConfig opt_d;
  diff::OptimizerConfig opt_g;
  std::uint64_t seed = 0;
  // Share of each class held out for best-epoch selection; 0 disables it.
  double validation_fraction = 0.1;
  // M is updated on real and generated rows.
  bool train_classifier = true;
  // G plays against M (complement targets). Off for a plain cGAN.
  bool classifier_adversarial = true;

  void validate() const;
};

enum class StepKind { FeatureUpdate, RealUpdate, FakeUpdate, GeneratorVsClassifier, GeneratorVsDiscriminator };

std::string_view to_string(StepKind k);

// Called after each update with the model as it stands afterwards.
using StepObserver = std::function<void(StepKind, const GamoModel&)>;

// Mean loss per step type over one epoch; unset when the step did not run.
struct EpochRecord {
  std::size_t epoch = 0;
  std::optional<double> loss_f;
  std::optional<double> loss_m_real;
  std::optional<double> loss_m_fake;
  std::optional<double> loss_d_real;
  std::optional<double> loss_d_fake;
  std::optional<double> loss_g_vs_m;
  std::optional<double> loss_g_vs_d;
  std::optional<double> val_acsa;
  std::optional<double> val_gm;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const EpochRecord& r);

struct Optimizers {
  const GamoModel* owner = nullptr;
  diff::Optimizer f;
  diff::Optimizer m;
  diff::Optimizer d;
  diff::Optimizer g;
};

struct RunState {
  std::size_t epoch = 0;
  std::vector<EpochRecord> trace;
  Rng rng;
  std::optional<Optimizers> optimizers;
  std::optional<diff::Checkpoint> best;
  std::optional<double> best_acsa;
  std::size_t best_epoch = 0;

  // Textual engine state of the RNG (restorable with set_rng_state).
  std::string rng_state() const;
  void set_rng_state(const std::string& s);
};

RunState make_run_state(const TrainConfig& cfg);

struct TrainingData {
  Dataset fit;
  std::optional<Dataset> validation;
};

// Stratified holdout of cfg.validation_fraction. Validation is skipped when
// the fraction is 0 or some class has fewer than two rows.
TrainingData split_for_training(const Dataset& data, const TrainConfig& cfg);

// One pass of the outer loop: u F-steps (identity F skips them), then v
// rounds of real M/D update, generated M/D update, G vs M, G vs D.
void train_epoch(GamoModel& model, const Dataset& fit, const TrainConfig& cfg, RunState& state,
                 const StepObserver& observer = {});

// Runs cfg.epochs epochs and restores the parameters of the epoch with the
// best validation ACSA (the latest one on ties; the last epoch without
// validation). Marks the model trained.
RunState train(GamoModel& model, const TrainingData& data, const TrainConfig& cfg,
               const std::function<void(const EpochRecord&)>& on_epoch = {});

eval::EvalReport evaluate(const GamoModel& model, const Dataset& test, std::uint64_t seed = 0);

}  // namespace gamo::train
