#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <vector>

#include "gamo/data/dataset.hpp"
#include "gamo/model/gamo_model.hpp"

namespace gamo::baselines {

struct SyntheticRange {
  std::size_t class_index = 0;
  int source_label = 0;
  std::size_t begin = 0;  // first synthetic row
  std::size_t end = 0;    // one past the last
};

struct BalancedExport {
  data::Dataset data;
  std::vector<SyntheticRange> ranges;
};

// n_{c-1} - n_i generated rows per minority class i, drawn from G, appended
// after the training rows. Rows live in feature space, i.e. F(x) for the
// originals. Throws ConfigError for an untrained model or one without G.
BalancedExport export_balanced_dataset(const model::GamoModel& model, std::mt19937_64& rng);

// Only the generated rows of every minority class, (n_{c-1} - n_i) each.
std::vector<diff::Tensor> generate_balancing_samples(const model::GamoModel& model, std::mt19937_64& rng);

// CSV in the load_csv schema plus `<csv>.json` listing the synthetic ranges.
void write_export(const std::filesystem::path& csv, const BalancedExport& e);

}  // namespace gamo::baselines
