#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gamo/baselines/variants.hpp"
#include "gamo/data/dataset.hpp"

namespace gamo::cli {

// Flat view of an INI file: "[train.opt_g]" + "lr = 1e-4" becomes the key
// "train.opt_g.lr". Keys remember the line they were defined on.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
  };

  static IniDocument parse(std::istream& in);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  // Marks the key as consumed; nullptr when absent.
  const Entry* take(const std::string& key);
  // Throws SpecError for the first key nobody consumed.
  void reject_unused() const;
  // 0 when absent.
  std::size_t line(const std::string& key) const;
  std::size_t section_line(const std::string& section) const;

 private:
  std::map<std::string, Entry> entries_;
  std::map<std::string, std::size_t> sections_;
};

enum class DataSource { Toy, Csv, Idx };

struct DatasetSpec {
  DataSource source = DataSource::Toy;
  std::string preset = "two_gaussians";
  // Training rows per source label (ascending label order).
  std::vector<std::size_t> counts;
  std::size_t test_per_class = 0;
  // Unset: the dataset is redrawn with every repetition seed.
  std::optional<std::uint64_t> seed;
  bool standardize = false;
  std::filesystem::path path;
  std::filesystem::path test_path;
  std::filesystem::path images;
  std::filesystem::path labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
};

struct RunSpec {
  DatasetSpec dataset;
  baselines::Variant variant = baselines::Variant::GAMO;
  baselines::ExperimentConfig experiment;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  std::filesystem::path output = "runs";
  std::vector<baselines::Variant> ablate_variants;
  std::vector<model::LossVariant> ablate_losses;
};

// Relative paths resolve against `base_dir`. Throws SpecError naming the
// field and line.
RunSpec parse_run_spec(std::istream& in, const std::filesystem::path& base_dir = {});
RunSpec load_run_spec(const std::filesystem::path& path);

struct ExperimentData {
  data::Dataset train;
  data::Dataset test;
};

// Train/test pair for one repetition seed; the test set shares the training
// class mapping.
ExperimentData build_datasets(const DatasetSpec& spec, std::uint64_t seed);

}  // namespace gamo::cli
