#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gamo/cli/run_spec.hpp"
#include "gamo/evalor/metrics.hpp"
#include "gamo/oracle/checks.hpp"

namespace gamo::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSpecError = 2, kCheckFailure = 3 };

struct RepetitionResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  eval::EvalReport report;
  std::size_t best_epoch = 0;
};

// Mean and sample standard deviation (n - 1; 0 for a single value).
struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

Summary summarize(std::span<const double> values);

struct ExperimentResult {
  baselines::Variant variant = baselines::Variant::GAMO;
  model::LossVariant loss = model::LossVariant::LeastSquares;
  std::vector<RepetitionResult> reps;

  Summary acsa() const;
  Summary gm() const;
  std::size_t failures() const;
};

// "<VARIANT>_<LOSS>", the experiment's directory under the output root.
std::string experiment_name(baselines::Variant v, model::LossVariant loss);

// Repetition k uses seed spec.seed + k and writes <dir>/rep_<k>/:
// model.ckpt, log.jsonl, report.json, train.csv and, when the variant
// produced extra rows, synthetic.csv. A failed repetition leaves error.txt
// and does not stop the others. Up to `jobs` repetitions run at once.
ExperimentResult run_experiment(const RunSpec& spec, baselines::Variant v, model::LossVariant loss,
                                const std::filesystem::path& dir, std::size_t jobs, std::ostream* progress);

// Header, one row per repetition, then one summary row per experiment.
void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results);

// Variants x {loss} x {ACSA, GM}, cells "mean ± std".
void write_ablation_table(std::ostream& markdown, std::ostream& csv, std::span<const ExperimentResult> results,
                          std::span<const baselines::Variant> variants, std::span<const model::LossVariant> losses);

int cmd_train(const RunSpec& spec, std::size_t jobs, std::ostream& out);
int cmd_ablate(const RunSpec& spec, std::size_t jobs, std::ostream& out);
int cmd_oracle(const oracle::OracleOptions& opt, std::ostream& out);
// One SVG per experiment directory of a run (repetition 0), into out_dir.
int cmd_plot(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir, std::ostream& out);
int cmd_export(const std::filesystem::path& model_path, const std::filesystem::path& csv, std::uint64_t seed,
               std::ostream& out);

}  // namespace gamo::cli
