#include "gamo/trainer/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "gamo/diffcore/ops.hpp"
#include "gamo/error.hpp"
#include "gamo/model/losses.hpp"

namespace gamo::train {

namespace {

using diff::Mode;
using diff::Tape;
using diff::Var;

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(double v) {
    sum += v;
    ++n;
  }
  std::optional<double> get() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

template <class Fn>
void guarded(const char* step, std::size_t epoch, std::size_t iter, Fn&& fn) {
  try {
    fn();
  } catch (const NumericError& e) {
    throw NumericError("epoch " + std::to_string(epoch) + ", " + step + " step " + std::to_string(iter) + ": " +
                       e.what());
  }
}

bool has_oversampling_weight(std::span<const double> priors) {
  for (std::size_t i = 0; i + 1 < priors.size(); ++i) {
    if (priors.back() - priors[i] > 0.0) return true;
  }
  return false;
}

Optimizers& optimizers_for(GamoModel& model, const TrainConfig& cfg, RunState& state) {
  if (!state.optimizers) {
    Optimizers o;
    o.owner = &model;
    o.f = diff::Optimizer(cfg.opt_f, model.extractor().net().parameters());
    o.m = diff::Optimizer(cfg.opt_m, model.classifier().net().parameters());
    if (model.has_discriminator()) o.d = diff::Optimizer(cfg.opt_d, model.discriminator().net().parameters());
    if (model.has_generator()) o.g = diff::Optimizer(cfg.opt_g, model.generator().parameters());
    state.optimizers = std::move(o);
  } else if (state.optimizers->owner != &model) {
    throw ConfigError("run state belongs to a different model");
  }
  return *state.optimizers;
}

diff::Checkpoint parameter_snapshot(const GamoModel& model) {
  diff::Checkpoint ckpt;
  for (const auto* p : model.parameters()) ckpt.entries.push_back({p->name, p->value});
  return ckpt;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (u && *u < 1) throw ConfigError("u must be >= 1");
  if (v && *v < 1) throw ConfigError("v must be >= 1");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0) {
    throw ConfigError("validation_fraction must lie in [0, 1)");
  }
  for (const auto* o : {&opt_f, &opt_m, &opt_d, &opt_g}) {
    if (!(o->learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  }
}

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::FeatureUpdate: return "F";
    case StepKind::RealUpdate: return "MD-real";
    case StepKind::FakeUpdate: return "MD-fake";
    case StepKind::GeneratorVsClassifier: return "G-vs-M";
    case StepKind::GeneratorVsDiscriminator: return "G-vs-D";
  }
  return "?";
}

nlohmann::json to_json(const EpochRecord& r) {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["epoch"] = r.epoch;
  j["loss"] = {{"F", opt(r.loss_f)},           {"M_real", opt(r.loss_m_real)}, {"M_fake", opt(r.loss_m_fake)},
               {"D_real", opt(r.loss_d_real)}, {"D_fake", opt(r.loss_d_fake)}, {"G_vs_M", opt(r.loss_g_vs_m)},
               {"G_vs_D", opt(r.loss_g_vs_d)}};
  j["val_acsa"] = opt(r.val_acsa);
  j["val_gm"] = opt(r.val_gm);
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

std::string RunState::rng_state() const {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void RunState::set_rng_state(const std::string& s) {
  std::istringstream is(s);
  is >> rng;
  if (!is) throw DataError("malformed RNG state");
}

RunState make_run_state(const TrainConfig& cfg) {
  RunState state;
  state.rng.seed(model::mix_seed(cfg.seed, 7));
  return state;
}

TrainingData split_for_training(const Dataset& data, const TrainConfig& cfg) {
  bool ok = cfg.validation_fraction > 0.0;
  for (std::size_t i = 0; ok && i < data.class_count(); ++i) ok = data.class_size(i) >= 2;
  if (!ok) return {data, std::nullopt};
  auto split = data::stratified_holdout(data, cfg.validation_fraction, model::mix_seed(cfg.seed, 11));
  return {std::move(split.train), std::move(split.test)};
}

void train_epoch(GamoModel& model, const Dataset& fit, const TrainConfig& cfg, RunState& state,
                 const StepObserver& observer) {
  cfg.validate();
  if (fit.class_count() != model.classes()) throw ConfigError("model and data disagree on the class count");
  if (fit.dim() != model.config().input_dim) throw ConfigError("model and data disagree on the input dimension");
  auto& opt = optimizers_for(model, cfg, state);
  const auto start = std::chrono::steady_clock::now();
  const std::size_t epoch = state.epoch;
  const std::size_t n = fit.size();
  const std::size_t b = cfg.batch;
  const std::size_t steps = (n + b - 1) / b;
  const std::size_t u = cfg.u.value_or(steps);
  const std::size_t v = cfg.v.value_or(steps);
  const auto& raw = fit.features();
  const auto& labels = fit.labels();
  const LossVariant lv = cfg.loss;
  const bool has_d = model.has_discriminator();
  const bool has_g = model.has_generator();
  const bool fake_labels_ok = has_oversampling_weight(fit.priors());
  auto notify = [&](StepKind k) {
    if (observer) observer(k, model);
  };
  auto batch_labels = [&](const std::vector<std::size_t>& rows) {
    std::vector<int> y(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) y[k] = labels[rows[k]];
    return y;
  };

  EpochRecord rec;
  rec.epoch = epoch;
  Mean f_loss, m_real, m_fake, d_real, d_fake, g_m, g_d;

  if (!model.extractor().identity()) {
    for (std::size_t s = 0; s < u; ++s) {
      const auto rows = sample_rows(n, b, state.rng);
      const auto y = batch_labels(rows);
      const Tensor x = gather_rows(raw, rows);
      guarded("F", epoch, s, [&] {
        Tape tape;
        const Var feat = model.extractor().forward(tape, tape.borrow(x), Mode::Trainable);
        const Var loss = model::classifier_loss(lv, model.classifier().forward(tape, feat, Mode::Frozen), y);
        const double value = loss.value().item();
        opt.f.step(tape.backward(loss));
        f_loss.add(value);
      });
      notify(StepKind::FeatureUpdate);
    }
    model.refresh_generator_data();
  }

  const std::size_t latent = has_g ? model.generator().latent_dim() : 0;
  for (std::size_t s = 0; s < v; ++s) {
    const auto rows = sample_rows(n, b, state.rng);
    const auto y = batch_labels(rows);
    const Tensor x = model.features(gather_rows(raw, rows));
    Tensor z_n;
    if (has_g) z_n = sample_latent(b, latent, state.rng);

    if (cfg.train_classifier || has_d) {
      guarded("M/D real", epoch, s, [&] {
        Tape tape;
        const Var xv = tape.borrow(x);
        std::optional<Var> lm, ld;
        if (cfg.train_classifier) lm = model::classifier_loss(lv, model.classifier().forward(tape, xv, Mode::Trainable), y);
        if (has_d) ld = model::discriminator_loss(lv, model.discriminator().forward(tape, xv, y, Mode::Trainable), true);
        const Var total = lm && ld ? diff::add(*lm, *ld) : lm ? *lm : *ld;
        if (lm) m_real.add(lm->value().item());
        if (ld) d_real.add(ld->value().item());
        const auto grads = tape.backward(total);
        if (lm) opt.m.step(grads);
        if (ld) opt.d.step(grads);
      });
      notify(StepKind::RealUpdate);
    }

    if (has_g && fake_labels_ok && (cfg.train_classifier || has_d)) {
      const auto y_n = assign_fake_labels(fit.priors(), b, state.rng);
      guarded("M/D fake", epoch, s, [&] {
        Tape tape;
        const Var gen = model.generator().generate(tape, tape.borrow(z_n), y_n, Mode::Frozen);
        std::optional<Var> lm, ld;
        if (cfg.train_classifier) {
          lm = model::classifier_loss(lv, model.classifier().forward(tape, gen, Mode::Trainable), y_n);
        }
        if (has_d) {
          ld = model::discriminator_loss(lv, model.discriminator().forward(tape, gen, y_n, Mode::Trainable), false);
        }
        const Var total = lm && ld ? diff::add(*lm, *ld) : lm ? *lm : *ld;
        if (lm) m_fake.add(lm->value().item());
        if (ld) d_fake.add(ld->value().item());
        const auto grads = tape.backward(total);
        if (lm) opt.m.step(grads);
        if (ld) opt.d.step(grads);
      });
      notify(StepKind::FakeUpdate);
    }

    if (!has_g) continue;
    const Tensor z_g = sample_latent(b, latent, state.rng);
    const auto y_g = assign_uniform_labels(model.classes(), b, state.rng);
    if (cfg.classifier_adversarial) {
      guarded("G vs M", epoch, s, [&] {
        Tape tape;
        const Var gen = model.generator().generate(tape, tape.borrow(z_g), y_g, Mode::Trainable);
        const Var loss =
            model::generator_loss_vs_classifier(lv, model.classifier().forward(tape, gen, Mode::Frozen), y_g);
        g_m.add(loss.value().item());
        opt.g.step(tape.backward(loss));
      });
      notify(StepKind::GeneratorVsClassifier);
    }
    if (has_d) {
      guarded("G vs D", epoch, s, [&] {
        Tape tape;
        const Var gen = model.generator().generate(tape, tape.borrow(z_g), y_g, Mode::Trainable);
        const Var loss = model::generator_loss_vs_discriminator(
            lv, model.discriminator().forward(tape, gen, y_g, Mode::Frozen));
        g_d.add(loss.value().item());
        opt.g.step(tape.backward(loss));
      });
      notify(StepKind::GeneratorVsDiscriminator);
    }
  }

  rec.loss_f = f_loss.get();
  rec.loss_m_real = m_real.get();
  rec.loss_m_fake = m_fake.get();
  rec.loss_d_real = d_real.get();
  rec.loss_d_fake = d_fake.get();
  rec.loss_g_vs_m = g_m.get();
  rec.loss_g_vs_d = g_d.get();
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  state.trace.push_back(rec);
  ++state.epoch;
}

RunState train(GamoModel& model, const TrainingData& data, const TrainConfig& cfg,
               const std::function<void(const EpochRecord&)>& on_epoch) {
  cfg.validate();
  RunState state = make_run_state(cfg);
  model.refresh_generator_data();
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    train_epoch(model, data.fit, cfg, state);
    auto& rec = state.trace.back();
    if (data.validation) {
      const auto report = evaluate(model, *data.validation);
      rec.val_acsa = report.acsa;
      rec.val_gm = report.gm;
      if (!state.best_acsa || report.acsa >= *state.best_acsa) {
        state.best_acsa = report.acsa;
        state.best_epoch = rec.epoch;
        state.best = parameter_snapshot(model);
      }
    }
    if (on_epoch) on_epoch(rec);
  }
  if (state.best) {
    model.load_parameters(*state.best);
  } else if (cfg.epochs > 0) {
    state.best_epoch = state.trace.back().epoch;
  }
  model.set_trained(true);
  return state;
}

eval::EvalReport evaluate(const GamoModel& model, const Dataset& test, std::uint64_t seed) {
  const auto predicted = model.predict(test.features());
  auto cm = eval::ConfusionMatrix::from_predictions(model.classes(), test.labels(), predicted);
  return eval::make_report(std::move(cm), model.config().variant, std::string(model::to_string(model.config().loss)),
                           seed);
}

}  // namespace gamo::train
