#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "gamo/cli/commands.hpp"
#include "gamo/cli/run_spec.hpp"
#include "gamo/cli/svg_plot.hpp"
#include "gamo/data/io.hpp"
#include "gamo/error.hpp"

using namespace gamo;
using namespace gamo::cli;
namespace fs = std::filesystem;

namespace {

const char* kTinySpec = R"(# small two-class toy
[run]
variant = GAMO
repetitions = 2
seed = 5

[dataset]
source = toy
preset = two_gaussians
counts = 80, 12
test_per_class = 40

[model]
latent = 4
transient = 8
generator_hidden = 16
hidden = 16

[train]
loss = LS
epochs = 2
batch = 16
)";

RunSpec parse(const std::string& text) {
  std::istringstream in(text);
  return parse_run_spec(in);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "gamo_unit_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

// Tag-balance check: every element closes in order, attributes are quoted.
bool well_formed_xml(const std::string& s, std::string& why) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  bool root_seen = false;
  while ((i = s.find('<', i)) != std::string::npos) {
    const std::size_t end = s.find('>', i);
    if (end == std::string::npos) return why = "unterminated tag", false;
    std::string tag = s.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.starts_with("?")) {
      if (!tag.ends_with("?")) return why = "bad declaration", false;
      continue;
    }
    if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return why = "unbalanced quotes in <" + tag + ">", false;
    if (tag.starts_with("/")) {
      const std::string name = tag.substr(1);
      if (stack.empty() || stack.back() != name) return why = "mismatched </" + name + ">", false;
      stack.pop_back();
      continue;
    }
    const bool self_closing = tag.ends_with("/");
    const std::string name = tag.substr(0, tag.find_first_of(" /\n"));
    if (stack.empty()) {
      if (root_seen) return why = "second root element", false;
      root_seen = true;
    }
    if (!self_closing) stack.push_back(name);
  }
  if (!stack.empty()) return why = "unclosed <" + stack.back() + ">", false;
  return root_seen;
}

}  // namespace

TEST(Ini, SectionsCommentsAndLines) {
  std::istringstream in("; header\n[a]\nx = 1 # trailing\n\n[a.b]\ny=two words\n");
  IniDocument doc = IniDocument::parse(in);
  EXPECT_TRUE(doc.has("a.x"));
  EXPECT_EQ(doc.line("a.b.y"), 6u);
  EXPECT_EQ(doc.section_line("a.b"), 5u);
  EXPECT_EQ(doc.take("a.x")->value, "1");
  EXPECT_EQ(doc.take("a.b.y")->value, "two words");
  EXPECT_EQ(doc.take("a.z"), nullptr);
  EXPECT_NO_THROW(doc.reject_unused());
}

TEST(Ini, DuplicatesAndUnknownKeys) {
  std::istringstream dup("[a]\nx = 1\nx = 2\n");
  EXPECT_THROW(IniDocument::parse(dup), SpecError);
  try {
    parse(std::string(kTinySpec) + "epochz = 3\n");
    FAIL() << "unknown key accepted";
  } catch (const SpecError& e) {
    EXPECT_EQ(e.field(), "train.epochz");
    EXPECT_EQ(e.line(), 23u);
  }
}

TEST(RunSpec, ParsesFieldsAndDefaults) {
  const RunSpec s = parse(kTinySpec);
  EXPECT_EQ(s.variant, baselines::Variant::GAMO);
  EXPECT_EQ(s.repetitions, 2u);
  EXPECT_EQ(s.seed, 5u);
  EXPECT_EQ(s.dataset.counts, (std::vector<std::size_t>{80, 12}));
  EXPECT_EQ(s.dataset.test_per_class, 40u);
  EXPECT_EQ(s.experiment.generator.latent, 4u);
  EXPECT_EQ(s.experiment.train.epochs, 2u);
  EXPECT_EQ(s.experiment.train.loss, model::LossVariant::LeastSquares);
  EXPECT_EQ(s.experiment.smote.k, 5u);
}

TEST(RunSpec, OptimizerDefaultsAndOverrides) {
  const RunSpec s = parse(std::string(kTinySpec) + "[train.optimizer]\nlr = 0.01\n[train.opt_g]\nlr = 0.002\nkind = sgd\n");
  EXPECT_EQ(s.experiment.train.opt_m.learning_rate, 0.01);
  EXPECT_EQ(s.experiment.train.opt_d.learning_rate, 0.01);
  EXPECT_EQ(s.experiment.train.opt_g.learning_rate, 0.002);
  EXPECT_EQ(s.experiment.train.opt_g.kind, diff::OptimizerKind::Sgd);
}

TEST(RunSpec, ErrorsNameFieldAndLine) {
  try {
    parse("[run]\nvariant = NOPE\n");
    FAIL();
  } catch (const SpecError& e) {
    EXPECT_EQ(e.field(), "run.variant");
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse("[train]\nepochs = -1\n"), SpecError);
  EXPECT_THROW(parse("[dataset]\ncounts = 10, x\n"), SpecError);
  EXPECT_THROW(parse("[dataset]\nsource = csv\n"), SpecError);
}

TEST(RunSpec, BuildDatasetsSharesClassMapping) {
  const RunSpec s = parse(kTinySpec);
  const auto a = build_datasets(s.dataset, 9);
  const auto b = build_datasets(s.dataset, 9);
  EXPECT_EQ(a.train.features(), b.train.features());
  EXPECT_EQ(a.train.class_sizes(), (std::vector<std::size_t>{12, 80}));
  EXPECT_EQ(a.test.class_sizes(), (std::vector<std::size_t>{40, 40}));
  EXPECT_EQ(a.test.class_labels(), a.train.class_labels());
}

TEST(RunSpec, ShippedToyConfigsLoad) {
  const RunSpec toy = load_run_spec(fs::path(GAMO_CONFIGS) / "toy2d.ini");
  EXPECT_EQ(toy.dataset.counts, (std::vector<std::size_t>{1000, 30}));
  EXPECT_EQ(toy.output, fs::path(GAMO_CONFIGS) / "../runs/toy2d");
  const RunSpec ab = load_run_spec(fs::path(GAMO_CONFIGS) / "ablation10.ini");
  EXPECT_EQ(ab.dataset.counts.size(), 10u);
  EXPECT_EQ(ab.ablate_variants.size(), 6u);
  EXPECT_EQ(ab.ablate_losses.size(), 2u);
  // the MNIST paths only resolve once the files are downloaded
  const fs::path mnist = fs::path(GAMO_CONFIGS) / "mnist.ini";
  if (fs::exists(fs::path(GAMO_CONFIGS) / "../data/mnist/train-images-idx3-ubyte")) {
    EXPECT_NO_THROW(load_run_spec(mnist));
  } else {
    EXPECT_THROW(load_run_spec(mnist), SpecError);
  }
}

TEST(RunSpec, CsvSourceResolvesRelativePaths) {
  std::istringstream in("[dataset]\nsource = csv\npath = small.csv\ntest_path = ../fixtures/small.csv\n");
  const RunSpec s = parse_run_spec(in, GAMO_FIXTURES);
  EXPECT_EQ(s.dataset.path, fs::path(GAMO_FIXTURES) / "small.csv");
  EXPECT_EQ(s.dataset.test_path, fs::path(GAMO_FIXTURES) / "../fixtures/small.csv");
}

TEST(Summary, MeanAndSampleStd) {
  const std::vector<double> v = {0.5, 0.7, 0.9};
  const Summary s = summarize(v);
  EXPECT_EQ(s.n, 3u);
  EXPECT_NEAR(s.mean, 0.7, 1e-15);
  EXPECT_NEAR(s.stddev, 0.2, 1e-15);
  const std::vector<double> one = {0.3};
  EXPECT_EQ(summarize(one).stddev, 0.0);
}

TEST(Commands, TrainWritesRepetitionsAndSummary) {
  RunSpec s = parse(kTinySpec);
  s.output = fresh_dir("train");
  std::ostringstream log;
  ASSERT_EQ(cmd_train(s, 2, log), kOk) << log.str();
  const auto rows = read_rows(s.output / "results.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "experiment");
  EXPECT_EQ(rows[3][3], "summary");
  EXPECT_EQ(rows[3][5], "2/2");
  const double a0 = std::stod(rows[1][6]), a1 = std::stod(rows[2][6]);
  EXPECT_EQ(std::stod(rows[3][6]), (a0 + a1) / 2.0);
  EXPECT_NEAR(std::stod(rows[3][8]), std::abs(a0 - a1) / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(rows[1][4], "5");
  EXPECT_EQ(rows[2][4], "6");
  for (const char* f : {"model.ckpt", "log.jsonl", "report.json", "train.csv", "synthetic.csv"})
    EXPECT_TRUE(fs::exists(s.output / "GAMO_LS" / "rep_1" / f)) << f;
}

TEST(Commands, AblateTableAndConsistencyWithTrain) {
  RunSpec s = parse(kTinySpec);
  s.repetitions = 1;
  s.ablate_variants = {baselines::Variant::CN, baselines::Variant::GAMO};
  s.output = fresh_dir("ablate");
  std::ostringstream log;
  ASSERT_EQ(cmd_ablate(s, 1, log), kOk) << log.str();

  const auto table = read_rows(s.output / "ablation.csv");
  ASSERT_EQ(table.size(), 3u);                // header + 2 variants
  EXPECT_EQ(table[0].size(), 1u + 2 * 2 * 2);  // variant + {CE, LS} x {ACSA, GM} x {mean, std}
  std::istringstream md(slurp(s.output / "ablation.md"));
  std::string header;
  std::getline(md, header);
  EXPECT_EQ(std::count(header.begin(), header.end(), '|'), 1 + 1 + 2 * 2);

  RunSpec t = s;
  t.output = fresh_dir("ablate_train");
  t.variant = baselines::Variant::GAMO;
  ASSERT_EQ(cmd_train(t, 1, log), kOk);
  const auto ab = read_rows(s.output / "results.csv");
  const auto tr = read_rows(t.output / "results.csv");
  auto find = [](const auto& rows, const std::string& exp) {
    for (const auto& r : rows)
      if (r[0] == exp && r[3] == "0") return r;
    return std::vector<std::string>{};
  };
  EXPECT_EQ(find(ab, "GAMO_LS"), find(tr, "GAMO_LS"));
}

TEST(Commands, AblateNeedsVariants) {
  RunSpec s = parse(kTinySpec);
  s.output = fresh_dir("ablate_empty");
  std::ostringstream log;
  EXPECT_THROW(cmd_ablate(s, 1, log), SpecError);
}

TEST(Commands, PlotIsValidSvgAndMatchesTheModel) {
  RunSpec s = parse(kTinySpec);
  s.repetitions = 1;
  s.output = fresh_dir("plot");
  std::ostringstream log;
  ASSERT_EQ(cmd_train(s, 1, log), kOk);
  const fs::path out = s.output / "plots";
  ASSERT_EQ(cmd_plot(s.output, out, log), kOk);
  const std::string svg = slurp(out / "GAMO_LS.svg");
  std::string why;
  EXPECT_TRUE(well_formed_xml(svg, why)) << why;
  EXPECT_NE(svg.find("<svg"), std::string::npos);

  const fs::path rep = s.output / "GAMO_LS" / "rep_0";
  const auto m = model::GamoModel::load(rep / "model.ckpt");
  const auto real = data::load_csv_rows(rep / "train.csv");
  const diff::Tensor* sets[] = {&real.features};
  const PlotBounds b = bounds_of(sets);
  const std::size_t n = 25;
  const auto grid = decision_grid(m, b, n);
  diff::Tensor pts = diff::Tensor::matrix(n * n, 2);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const auto p = grid_point(b, n, r, c);
      pts(r * n + c, 0) = p[0];
      pts(r * n + c, 1) = p[1];
    }
  }
  EXPECT_EQ(grid, m.predict(pts));
  EXPECT_GT(grid_point(b, n, 0, 0)[1], grid_point(b, n, n - 1, 0)[1]);

  // synthetic rows are convex combinations of the minority rows: in 2-D
  // every one lies inside the minority bounding box
  const auto synth = data::load_csv_rows(rep / "synthetic.csv");
  const auto& x = m.class_data(0);
  ASSERT_GT(synth.features.rows(), 0u);
  for (std::size_t j = 0; j < 2; ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t r = 0; r < x.rows(); ++r) lo = std::min(lo, x(r, j)), hi = std::max(hi, x(r, j));
    for (std::size_t r = 0; r < synth.features.rows(); ++r) {
      EXPECT_GE(synth.features(r, j), lo - 1e-9);
      EXPECT_LE(synth.features(r, j), hi + 1e-9);
    }
  }
}

TEST(Commands, ExportWritesBalancedCsv) {
  RunSpec s = parse(kTinySpec);
  s.repetitions = 1;
  s.output = fresh_dir("export");
  std::ostringstream log;
  ASSERT_EQ(cmd_train(s, 1, log), kOk);
  const fs::path csv = s.output / "balanced.csv";
  ASSERT_EQ(cmd_export(s.output / "GAMO_LS" / "rep_0" / "model.ckpt", csv, 3, log), kOk);
  const data::Dataset d = data::load_csv(csv);
  const auto sizes = d.class_sizes();
  EXPECT_EQ(sizes.front(), sizes.back());
  EXPECT_TRUE(fs::exists(csv.string() + ".json"));
}

TEST(Svg, EscapesTitle) {
  ScatterPlot p;
  p.title = "a<b & \"c\"";
  p.grid = 2;
  p.regions = {0, 1, 1, 0};
  p.real = diff::Tensor::from_rows({{0.2, 0.3}, {0.8, 0.9}});
  p.real_labels = {0, 1};
  p.synthetic = diff::Tensor::from_rows({{0.5, 0.5}});
  p.synthetic_labels = {0};
  std::ostringstream out;
  write_svg(out, p);
  std::string why;
  EXPECT_TRUE(well_formed_xml(out.str(), why)) << why;
  EXPECT_NE(out.str().find("a&lt;b &amp; &quot;c&quot;"), std::string::npos);
}
