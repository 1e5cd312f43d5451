#include "gamo/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gamo/baselines/export.hpp"
#include "gamo/baselines/variants.hpp"
#include "gamo/cli/svg_plot.hpp"
#include "gamo/data/io.hpp"
#include "gamo/error.hpp"

namespace gamo::cli {

namespace fs = std::filesystem;
using baselines::Variant;
using model::LossVariant;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch == '\n' ? ' ' : ch;
  }
  return out + "\"";
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

nlohmann::json report_json(const RepetitionResult& r, const model::GamoModel& m) {
  const auto& rep = r.report;
  nlohmann::json cm = nlohmann::json::array();
  for (std::size_t t = 0; t < rep.confusion.classes(); ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t p = 0; p < rep.confusion.classes(); ++p) row.push_back(rep.confusion(t, p));
    cm.push_back(row);
  }
  return {{"variant", rep.variant},       {"loss", rep.loss},       {"seed", r.seed},
          {"acsa", rep.acsa},             {"gm", rep.gm},           {"recalls", rep.recalls},
          {"confusion", cm},              {"best_epoch", r.best_epoch}, {"class_labels", m.class_labels()}};
}

// Rows the classifier saw beyond the real training data.
std::optional<data::Dataset> synthetic_rows(const baselines::VariantRun& run, std::uint64_t seed) {
  if (run.augmented && run.augmented->size() > run.original_rows) {
    std::vector<std::size_t> rows;
    for (std::size_t r = run.original_rows; r < run.augmented->size(); ++r) rows.push_back(r);
    return run.augmented->subset(rows);
  }
  if (!run.model.has_generator()) return std::nullopt;
  std::mt19937_64 rng(model::mix_seed(seed, 41));
  const auto blocks = baselines::generate_balancing_samples(run.model, rng);
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.rows();
  if (total == 0) return std::nullopt;
  const std::size_t d = blocks.front().cols();
  diff::Tensor f = diff::Tensor::matrix(total, d);
  std::vector<int> labels;
  std::size_t at = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    std::copy(blocks[i].values().begin(), blocks[i].values().end(), f.data() + at * d);
    at += blocks[i].rows();
    labels.insert(labels.end(), blocks[i].rows(), static_cast<int>(i));
  }
  return data::Dataset::from_class_indices(std::move(f), std::move(labels), run.model.class_labels());
}

RepetitionResult run_repetition(const RunSpec& spec, Variant v, LossVariant loss, const fs::path& dir, std::size_t k,
                                std::ostream* progress, std::mutex& mu) {
  RepetitionResult r;
  r.index = k;
  r.seed = spec.seed + k;
  const fs::path rep_dir = dir / ("rep_" + std::to_string(k));
  fs::create_directories(rep_dir);
  fs::remove(rep_dir / "error.txt");
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto data = build_datasets(spec.dataset, r.seed);
    auto cfg = spec.experiment;
    cfg.train.loss = loss;
    cfg.train.seed = r.seed;
    auto run = baselines::train_variant(v, data.train, data.test, cfg);
    r.report = run.report;
    r.best_epoch = run.state.best_epoch;
    r.ok = true;

    run.model.save(rep_dir / "model.ckpt");
    std::string log;
    for (const auto& e : run.state.trace) log += train::to_json(e).dump() + "\n";
    write_text(rep_dir / "log.jsonl", log);
    write_text(rep_dir / "report.json", report_json(r, run.model).dump(2) + "\n");
    data::write_csv(rep_dir / "train.csv", run.fit);
    fs::remove(rep_dir / "synthetic.csv");
    if (auto syn = synthetic_rows(run, r.seed)) data::write_csv(rep_dir / "synthetic.csv", *syn);
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
    write_text(rep_dir / "error.txt", r.error + "\n");
  }
  if (progress) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::lock_guard lock(mu);
    *progress << experiment_name(v, loss) << " rep " << k << " seed " << r.seed << ": ";
    if (r.ok) {
      *progress << "ACSA " << fixed(r.report.acsa, 4) << " GM " << fixed(r.report.gm, 4);
    } else {
      *progress << "FAILED (" << r.error << ")";
    }
    *progress << " [" << fixed(secs, 1) << " s]\n" << std::flush;
  }
  return r;
}

std::string cell(const Summary& s) {
  if (s.n == 0) return "n/a";
  return fixed(s.mean, 4) + " ± " + fixed(s.stddev, 4);
}

}  // namespace

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
  }
  return s;
}

Summary ExperimentResult::acsa() const {
  std::vector<double> v;
  for (const auto& r : reps)
    if (r.ok) v.push_back(r.report.acsa);
  return summarize(v);
}

Summary ExperimentResult::gm() const {
  std::vector<double> v;
  for (const auto& r : reps)
    if (r.ok) v.push_back(r.report.gm);
  return summarize(v);
}

std::size_t ExperimentResult::failures() const {
  std::size_t n = 0;
  for (const auto& r : reps) n += r.ok ? 0 : 1;
  return n;
}

std::string experiment_name(Variant v, LossVariant loss) {
  return std::string(baselines::to_string(v)) + "_" + std::string(model::to_string(loss));
}

ExperimentResult run_experiment(const RunSpec& spec, Variant v, LossVariant loss, const fs::path& dir,
                                std::size_t jobs, std::ostream* progress) {
  ExperimentResult res;
  res.variant = v;
  res.loss = loss;
  res.reps.resize(spec.repetitions);
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < spec.repetitions; k = next++) {
      res.reps[k] = run_repetition(spec, v, loss, dir, k, progress, mu);
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(jobs, 1), spec.repetitions);
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return res;
}

void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results) {
  out << "experiment,variant,loss,repetition,seed,status,acsa,gm,acsa_std,gm_std,error\n";
  for (const auto& e : results) {
    const std::string name = experiment_name(e.variant, e.loss);
    const std::string head = name + "," + std::string(baselines::to_string(e.variant)) + "," +
                             std::string(model::to_string(e.loss)) + ",";
    for (const auto& r : e.reps) {
      out << head << r.index << ',' << r.seed << ',';
      if (r.ok) {
        out << "ok," << g17(r.report.acsa) << ',' << g17(r.report.gm) << ",,,\n";
      } else {
        out << "failed,,,,," << csv_quote(r.error) << '\n';
      }
    }
    const auto a = e.acsa(), g = e.gm();
    out << head << "summary,," << a.n << '/' << e.reps.size() << ',';
    if (a.n > 0) {
      out << g17(a.mean) << ',' << g17(g.mean) << ',' << g17(a.stddev) << ',' << g17(g.stddev) << ",\n";
    } else {
      out << ",,,,\n";
    }
  }
}

void write_ablation_table(std::ostream& md, std::ostream& csv, std::span<const ExperimentResult> results,
                          std::span<const Variant> variants, std::span<const LossVariant> losses) {
  auto find = [&](Variant v, LossVariant l) -> const ExperimentResult* {
    for (const auto& e : results)
      if (e.variant == v && e.loss == l) return &e;
    return nullptr;
  };
  md << "| Variant |";
  csv << "variant";
  for (auto l : losses) {
    const std::string t(model::to_string(l));
    md << ' ' << t << " ACSA | " << t << " GM |";
    csv << ',' << t << "_acsa_mean," << t << "_acsa_std," << t << "_gm_mean," << t << "_gm_std";
  }
  md << "\n|---|";
  csv << '\n';
  for (std::size_t i = 0; i < losses.size(); ++i) md << "---|---|";
  md << '\n';
  for (auto v : variants) {
    md << "| " << baselines::to_string(v) << " |";
    csv << baselines::to_string(v);
    for (auto l : losses) {
      const auto* e = find(v, l);
      const Summary a = e ? e->acsa() : Summary{}, g = e ? e->gm() : Summary{};
      md << ' ' << cell(a) << " | " << cell(g) << " |";
      for (const auto& s : {a, g}) {
        if (s.n > 0) {
          csv << ',' << g17(s.mean) << ',' << g17(s.stddev);
        } else {
          csv << ",,";
        }
      }
    }
    md << '\n';
    csv << '\n';
  }
}

int cmd_train(const RunSpec& spec, std::size_t jobs, std::ostream& out) {
  fs::create_directories(spec.output);
  const auto loss = spec.experiment.train.loss;
  std::vector<ExperimentResult> results;
  results.push_back(run_experiment(spec, spec.variant, loss, spec.output / experiment_name(spec.variant, loss), jobs,
                                   &out));
  std::ofstream csv(spec.output / "results.csv", std::ios::binary);
  write_results_csv(csv, results);
  const auto& e = results.front();
  out << experiment_name(e.variant, e.loss) << ": ACSA " << cell(e.acsa()) << ", GM " << cell(e.gm()) << " over "
      << e.acsa().n << '/' << e.reps.size() << " repetitions\n";
  out << "results: " << (spec.output / "results.csv").string() << '\n';
  return e.failures() == e.reps.size() ? kCheckFailure : kOk;
}

int cmd_ablate(const RunSpec& spec, std::size_t jobs, std::ostream& out) {
  if (spec.ablate_variants.empty()) throw SpecError("ablate.variants", 0, "empty variant list");
  std::vector<LossVariant> losses = spec.ablate_losses;
  if (losses.empty()) losses = {LossVariant::CrossEntropy, LossVariant::LeastSquares};
  fs::create_directories(spec.output);
  std::vector<ExperimentResult> results;
  std::size_t failed = 0, total = 0;
  for (auto v : spec.ablate_variants) {
    for (auto l : losses) {
      results.push_back(run_experiment(spec, v, l, spec.output / experiment_name(v, l), jobs, &out));
      failed += results.back().failures();
      total += results.back().reps.size();
    }
  }
  {
    std::ofstream csv(spec.output / "results.csv", std::ios::binary);
    write_results_csv(csv, results);
  }
  std::ofstream md(spec.output / "ablation.md", std::ios::binary);
  std::ofstream csv(spec.output / "ablation.csv", std::ios::binary);
  write_ablation_table(md, csv, results, spec.ablate_variants, losses);
  std::ostringstream unused;
  out << '\n';
  write_ablation_table(out, unused, results, spec.ablate_variants, losses);
  return failed == total ? kCheckFailure : kOk;
}

int cmd_oracle(const oracle::OracleOptions& opt, std::ostream& out) {
  const auto results = oracle::run_all(opt);
  std::size_t passed = 0;
  auto line = [&](const oracle::CheckResult& r, const char* status) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e <= %.1e", r.measured, r.tolerance);
    out << status << "  " << r.name << "  " << buf;
    if (!r.detail.empty()) out << "  (" << r.detail << ')';
    out << '\n';
  };
  for (const auto& r : results) {
    line(r, r.passed ? "PASS" : "FAIL");
    passed += r.passed ? 1 : 0;
  }
  line(oracle::theorem1_plain_sum_spread(opt), "INFO");
  out << passed << '/' << results.size() << " checks passed\n";
  return passed == results.size() ? kOk : kCheckFailure;
}

int cmd_plot(const fs::path& run_dir, const fs::path& out_dir, std::ostream& out) {
  if (!fs::is_directory(run_dir)) throw Error("not a run directory: " + run_dir.string());
  std::vector<fs::path> experiments;
  for (const auto& entry : fs::directory_iterator(run_dir)) {
    if (entry.is_directory() && fs::is_regular_file(entry.path() / "rep_0" / "model.ckpt")) {
      experiments.push_back(entry.path());
    }
  }
  std::sort(experiments.begin(), experiments.end());
  if (experiments.empty()) throw Error("no trained experiments under " + run_dir.string());
  fs::create_directories(out_dir);

  for (const auto& dir : experiments) {
    const fs::path rep = dir / "rep_0";
    const auto m = model::GamoModel::load(rep / "model.ckpt");
    if (m.config().input_dim != 2 || m.config().feature_dim != 0) {
      throw ConfigError(dir.filename().string() + ": plots need a 2-D dataset with identity features (input dim " +
                        std::to_string(m.config().input_dim) + ")");
    }
    std::map<int, int> to_index;
    for (std::size_t i = 0; i < m.class_labels().size(); ++i) to_index[m.class_labels()[i]] = static_cast<int>(i);
    auto read = [&](const fs::path& p, diff::Tensor& f, std::vector<int>& labels) {
      auto rows = data::load_csv_rows(p);
      f = std::move(rows.features);
      labels.clear();
      for (int l : rows.labels) {
        auto it = to_index.find(l);
        if (it == to_index.end()) throw DataError(p.string() + ": label " + std::to_string(l) + " unknown to model");
        labels.push_back(it->second);
      }
    };
    ScatterPlot plot;
    plot.title = dir.filename().string();
    plot.classes = m.classes();
    read(rep / "train.csv", plot.real, plot.real_labels);
    plot.synthetic = diff::Tensor::matrix(0, 2);
    if (fs::is_regular_file(rep / "synthetic.csv")) read(rep / "synthetic.csv", plot.synthetic, plot.synthetic_labels);
    const diff::Tensor* sets[] = {&plot.real, &plot.synthetic};
    plot.bounds = bounds_of(sets);
    plot.regions = decision_grid(m, plot.bounds, plot.grid);
    const fs::path svg = out_dir / (dir.filename().string() + ".svg");
    std::ofstream f(svg, std::ios::binary);
    write_svg(f, plot);
    out << "wrote " << svg.string() << '\n';
  }
  return kOk;
}

int cmd_export(const fs::path& model_path, const fs::path& csv, std::uint64_t seed, std::ostream& out) {
  const auto m = model::GamoModel::load(model_path);
  std::mt19937_64 rng(seed);
  const auto e = baselines::export_balanced_dataset(m, rng);
  if (csv.has_parent_path()) fs::create_directories(csv.parent_path());
  baselines::write_export(csv, e);
  std::size_t synthetic = 0;
  for (const auto& r : e.ranges) synthetic += r.end - r.begin;
  out << "wrote " << csv.string() << ": " << e.data.size() << " rows, " << synthetic << " synthetic\n";
  return kOk;
}

}  // namespace gamo::cli
