#include "gamo/model/gamo_model.hpp"

#include <string>

#include "gamo/error.hpp"

namespace gamo::model {

namespace {

constexpr const char* kFormat = "gamo-model";

// Builds the networks of `config` for the given raw class matrices.
void build(const ModelConfig& config, FeatureExtractor& f, Classifier& m,
           std::optional<Discriminator>& d, std::unique_ptr<Generator>& g, const std::vector<Tensor>& class_data) {
  const std::size_t c = config.classes;
  const std::uint64_t seed = config.seed;
  if (config.feature_dim > 0) {
    const std::size_t dims[] = {config.input_dim, config.feature_dim};
    f = FeatureExtractor(make_stack(dims, diff::Activation::Relu, mix_seed(seed, 1), "F"));
  } else {
    f = FeatureExtractor();
  }
  const std::size_t feat = config.feature_dim > 0 ? config.feature_dim : config.input_dim;
  const std::size_t m_dims[] = {feat, config.hidden, c};
  m = Classifier(make_stack(m_dims, diff::Activation::Sigmoid, mix_seed(seed, 2), "M"));
  d.reset();
  if (config.discriminator) {
    const std::size_t d_dims[] = {feat + c, config.hidden, 1};
    d.emplace(make_stack(d_dims, diff::Activation::Sigmoid, mix_seed(seed, 3), "D"), c);
  }
  g.reset();
  std::vector<Tensor> minority;
  for (std::size_t i = 0; i + 1 < c; ++i) minority.push_back(f.forward(class_data[i]));
  if (config.generator_kind == GeneratorKind::Convex) {
    g = std::make_unique<ConvexGenerator>(make_convex_generator(config.generator, std::move(minority), c, seed));
  } else if (config.generator_kind == GeneratorKind::Dense) {
    std::size_t target = 0;
    if (config.match_convex_capacity) {
      target = make_convex_generator(config.generator, std::move(minority), c, seed).parameter_count();
    }
    g = std::make_unique<DenseGenerator>(make_dense_generator(config.generator, feat, c, target, seed));
  }
}

}  // namespace

GamoModel GamoModel::create(const ModelConfig& config, const data::Dataset& train) {
  if (config.classes < 2) throw ConfigError("model needs at least two classes");
  if (train.class_count() != config.classes) {
    throw ConfigError("model configured for " + std::to_string(config.classes) + " classes but data has " +
                      std::to_string(train.class_count()));
  }
  if (train.dim() != config.input_dim) {
    throw ConfigError("model input dim " + std::to_string(config.input_dim) + " does not match data dim " +
                      std::to_string(train.dim()));
  }
  train.require_size_order();
  GamoModel model;
  model.config_ = config;
  for (std::size_t i = 0; i < config.classes; ++i) model.class_data_.push_back(train.class_matrix(i));
  model.class_labels_ = train.class_labels();
  build(config, model.f_, model.m_, model.d_, model.g_, model.class_data_);
  return model;
}

GamoModel::GamoModel(const GamoModel& other)
    : config_(other.config_),
      f_(other.f_),
      m_(other.m_),
      d_(other.d_),
      g_(other.g_ ? other.g_->clone() : nullptr),
      class_data_(other.class_data_),
      class_labels_(other.class_labels_),
      trained_(other.trained_) {}

GamoModel& GamoModel::operator=(const GamoModel& other) {
  if (this != &other) {
    GamoModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

std::size_t GamoModel::feature_dim() const {
  return config_.feature_dim > 0 ? config_.feature_dim : config_.input_dim;
}

Discriminator& GamoModel::discriminator() {
  if (!d_) throw ConfigError("model has no discriminator");
  return *d_;
}

const Discriminator& GamoModel::discriminator() const {
  if (!d_) throw ConfigError("model has no discriminator");
  return *d_;
}

Generator& GamoModel::generator() {
  if (!g_) throw ConfigError("model has no generator");
  return *g_;
}

const Generator& GamoModel::generator() const {
  if (!g_) throw ConfigError("model has no generator");
  return *g_;
}

std::vector<std::size_t> GamoModel::class_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& x : class_data_) out.push_back(x.rows());
  return out;
}

void GamoModel::refresh_generator_data() {
  auto* convex = dynamic_cast<ConvexGenerator*>(g_.get());
  if (!convex) return;
  std::vector<Tensor> minority;
  for (std::size_t i = 0; i + 1 < classes(); ++i) minority.push_back(f_.forward(class_data_[i]));
  convex->set_class_data(std::move(minority));
}

std::vector<Parameter*> GamoModel::parameters() {
  std::vector<Parameter*> out = f_.net().parameters();
  auto append = [&](std::vector<Parameter*> p) { out.insert(out.end(), p.begin(), p.end()); };
  append(m_.net().parameters());
  if (d_) append(d_->net().parameters());
  if (g_) append(g_->parameters());
  return out;
}

std::vector<const Parameter*> GamoModel::parameters() const {
  std::vector<const Parameter*> out = f_.net().parameters();
  auto append = [&](std::vector<const Parameter*> p) { out.insert(out.end(), p.begin(), p.end()); };
  append(m_.net().parameters());
  if (d_) append(d_->net().parameters());
  if (g_) append(std::as_const(*g_).parameters());
  return out;
}

std::uint64_t GamoModel::hash() const {
  const auto params = parameters();
  return diff::parameter_hash(params);
}

nlohmann::json GamoModel::manifest() const {
  nlohmann::json j;
  j["format"] = kFormat;
  j["variant"] = config_.variant;
  j["classes"] = config_.classes;
  j["input_dim"] = config_.input_dim;
  j["latent"] = config_.generator.latent;
  j["transient"] = config_.generator.transient;
  j["generator_hidden"] = config_.generator.hidden;
  j["hidden"] = config_.hidden;
  j["feature_dim"] = config_.feature_dim;
  j["generator"] = std::string(to_string(config_.generator_kind));
  j["discriminator"] = config_.discriminator;
  j["match_convex_capacity"] = config_.match_convex_capacity;
  j["loss"] = std::string(to_string(config_.loss));
  j["seed"] = config_.seed;
  j["class_sizes"] = class_sizes();
  j["class_labels"] = class_labels_;
  j["trained"] = trained_;
  return j;
}

diff::Checkpoint GamoModel::to_checkpoint() const {
  diff::Checkpoint ckpt;
  ckpt.manifest = manifest();
  for (const auto* p : parameters()) ckpt.entries.push_back({p->name, p->value});
  for (std::size_t i = 0; i < class_data_.size(); ++i) {
    ckpt.entries.push_back({"data/class_" + std::to_string(i), class_data_[i]});
  }
  return ckpt;
}

GamoModel GamoModel::from_checkpoint(const diff::Checkpoint& ckpt) {
  const auto& j = ckpt.manifest;
  if (j.value("format", std::string()) != kFormat) throw DataError("checkpoint is not a model checkpoint");
  try {
    ModelConfig config;
    config.variant = j.at("variant").get<std::string>();
    config.classes = j.at("classes").get<std::size_t>();
    config.input_dim = j.at("input_dim").get<std::size_t>();
    config.generator.latent = j.at("latent").get<std::size_t>();
    config.generator.transient = j.at("transient").get<std::size_t>();
    config.generator.hidden = j.at("generator_hidden").get<std::size_t>();
    config.hidden = j.at("hidden").get<std::size_t>();
    config.feature_dim = j.at("feature_dim").get<std::size_t>();
    const auto kind = j.at("generator").get<std::string>();
    config.generator_kind = kind == "convex" ? GeneratorKind::Convex
                            : kind == "dense" ? GeneratorKind::Dense
                                              : GeneratorKind::None;
    config.discriminator = j.at("discriminator").get<bool>();
    config.match_convex_capacity = j.at("match_convex_capacity").get<bool>();
    config.loss = parse_loss_variant(j.at("loss").get<std::string>());
    config.seed = j.at("seed").get<std::uint64_t>();

    GamoModel model;
    model.config_ = config;
    for (std::size_t i = 0; i < config.classes; ++i) {
      model.class_data_.push_back(ckpt.at("data/class_" + std::to_string(i)));
    }
    model.class_labels_ = j.at("class_labels").get<std::vector<int>>();
    build(config, model.f_, model.m_, model.d_, model.g_, model.class_data_);
    model.load_parameters(ckpt);
    model.trained_ = j.at("trained").get<bool>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model manifest: ") + e.what());
  }
}

void GamoModel::load_parameters(const diff::Checkpoint& ckpt) {
  for (auto* p : parameters()) {
    const Tensor* v = ckpt.find(p->name);
    if (!v) throw DataError("checkpoint lacks parameter " + p->name);
    if (v->shape() != p->value.shape()) {
      throw DataError("checkpoint parameter " + p->name + " has shape " + diff::shape_string(v->shape()) +
                      ", model expects " + diff::shape_string(p->value.shape()));
    }
    p->value = *v;
  }
  refresh_generator_data();
}

void GamoModel::save(const std::filesystem::path& path) const { diff::save_checkpoint(path, to_checkpoint()); }

GamoModel GamoModel::load(const std::filesystem::path& path) { return from_checkpoint(diff::load_checkpoint(path)); }

}  // namespace gamo::model
