#include "gamo/baselines/export.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "gamo/data/io.hpp"
#include "gamo/error.hpp"
#include "gamo/trainer/sampling.hpp"

namespace gamo::baselines {

namespace {

constexpr std::size_t kChunk = 256;

}  // namespace

std::vector<diff::Tensor> generate_balancing_samples(const model::GamoModel& model, std::mt19937_64& rng) {
  if (!model.has_generator()) throw ConfigError("model has no generator to oversample with");
  const auto& g = model.generator();
  const auto sizes = model.class_sizes();
  const std::size_t c = sizes.size();
  const std::size_t d = model.feature_dim();
  std::vector<diff::Tensor> out;
  for (std::size_t i = 0; i + 1 < c; ++i) {
    const std::size_t count = sizes[c - 1] - sizes[i];
    diff::Tensor rows = diff::Tensor::matrix(count, d);
    for (std::size_t start = 0; start < count; start += kChunk) {
      const std::size_t m = std::min(kChunk, count - start);
      const auto z = train::sample_latent(m, g.latent_dim(), rng);
      const std::vector<int> labels(m, static_cast<int>(i));
      const auto gen = g.generate(z, labels);
      std::copy(gen.values().begin(), gen.values().end(),
                rows.values().begin() + static_cast<std::ptrdiff_t>(start * d));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

BalancedExport export_balanced_dataset(const model::GamoModel& model, std::mt19937_64& rng) {
  if (!model.trained()) throw ConfigError("export needs a trained model");
  const auto synth = generate_balancing_samples(model, rng);
  const std::size_t c = model.classes();
  const std::size_t d = model.feature_dim();
  std::size_t n = 0;
  for (std::size_t i = 0; i < c; ++i) n += model.class_data(i).rows();
  for (const auto& s : synth) n += s.rows();

  diff::Tensor f = diff::Tensor::matrix(n, d);
  std::vector<int> labels;
  labels.reserve(n);
  std::size_t row = 0;
  auto append = [&](const diff::Tensor& block, std::size_t cls) {
    std::copy(block.values().begin(), block.values().end(),
              f.values().begin() + static_cast<std::ptrdiff_t>(row * d));
    labels.insert(labels.end(), block.rows(), static_cast<int>(cls));
    row += block.rows();
  };
  for (std::size_t i = 0; i < c; ++i) append(model.features(model.class_data(i)), i);

  BalancedExport out;
  for (std::size_t i = 0; i < synth.size(); ++i) {
    SyntheticRange r{i, model.class_labels()[i], row, row + synth[i].rows()};
    append(synth[i], i);
    out.ranges.push_back(r);
  }
  out.data = data::Dataset::from_class_indices(std::move(f), std::move(labels), model.class_labels());
  return out;
}

void write_export(const std::filesystem::path& csv, const BalancedExport& e) {
  data::write_csv(csv, e.data);
  nlohmann::json j;
  j["rows"] = e.data.size();
  j["classes"] = e.data.class_count();
  j["class_labels"] = e.data.class_labels();
  j["synthetic"] = nlohmann::json::array();
  for (const auto& r : e.ranges) {
    j["synthetic"].push_back(
        {{"class_index", r.class_index}, {"label", r.source_label}, {"begin", r.begin}, {"end", r.end}});
  }
  auto sidecar = csv;
  sidecar += ".json";
  std::ofstream out(sidecar);
  if (!out) throw Error("cannot write " + sidecar.string());
  out << j.dump(2) << '\n';
}

}  // namespace gamo::baselines
