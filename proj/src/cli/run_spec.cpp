#include "gamo/cli/run_spec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gamo/data/io.hpp"
#include "gamo/data/toy.hpp"
#include "gamo/error.hpp"

namespace gamo::cli {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

bool valid_name(std::string_view s) {
  if (s.empty() || s.front() == '.' || s.back() == '.') return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) { return std::isalnum(ch) || ch == '_' || ch == '.'; });
}

// Comments start at '#' or ';' at the beginning of a line or after blanks.
std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Typed accessors over the document; each consumes its key.
class Reader {
 public:
  Reader(IniDocument& doc, std::filesystem::path base) : doc_(doc), base_(std::move(base)) {}

  template <class T>
  bool number(const std::string& key, T& out) {
    const auto* e = doc_.take(key);
    if (!e) return false;
    out = parse_number<T>(key, *e, e->value);
    return true;
  }

  bool boolean(const std::string& key, bool& out) {
    const auto* e = doc_.take(key);
    if (!e) return false;
    const auto v = lower(e->value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") {
      out = true;
    } else if (v == "false" || v == "no" || v == "off" || v == "0") {
      out = false;
    } else {
      throw SpecError(key, e->line, "expected a boolean, got '" + e->value + "'");
    }
    return true;
  }

  // Existing file, relative to the spec's directory.
  bool file(const std::string& key, std::filesystem::path& out) {
    const auto* e = doc_.take(key);
    if (!e) return false;
    std::filesystem::path p(e->value);
    if (p.is_relative() && !base_.empty()) p = base_ / p;
    if (!std::filesystem::is_regular_file(p)) throw SpecError(key, e->line, "file not found: " + p.string());
    out = p;
    return true;
  }

  bool directory(const std::string& key, std::filesystem::path& out) {
    const auto* e = doc_.take(key);
    if (!e) return false;
    std::filesystem::path p(e->value);
    if (p.is_relative() && !base_.empty()) p = base_ / p;
    out = p;
    return true;
  }

  template <class T>
  bool list(const std::string& key, std::vector<T>& out) {
    const auto* e = doc_.take(key);
    if (!e) return false;
    out.clear();
    for (const auto& item : split_list(e->value)) out.push_back(parse_number<T>(key, *e, item));
    if (out.empty()) throw SpecError(key, e->line, "empty list");
    return true;
  }

  // Applies `f` to every item; exceptions become SpecErrors on this key.
  template <class F>
  bool items(const std::string& key, F f) {
    const auto* e = doc_.take(key);
    if (!e) return false;
    const auto list = split_list(e->value);
    if (list.empty()) throw SpecError(key, e->line, "empty list");
    for (const auto& item : list) {
      try {
        f(item);
      } catch (const Error& err) {
        throw SpecError(key, e->line, err.what());
      }
    }
    return true;
  }

  template <class F>
  bool value(const std::string& key, F f) {
    const auto* e = doc_.take(key);
    if (!e) return false;
    try {
      f(e->value);
    } catch (const Error& err) {
      throw SpecError(key, e->line, err.what());
    }
    return true;
  }

  // Line of `key`, else of its section.
  std::size_t line(const std::string& key) const {
    if (auto l = doc_.line(key)) return l;
    const auto dot = key.rfind('.');
    return doc_.section_line(dot == std::string::npos ? key : key.substr(0, dot));
  }

 private:
  IniDocument& doc_;
  std::filesystem::path base_;

  template <class T>
  static T parse_number(const std::string& key, const IniDocument::Entry& e, const std::string& s) {
    T v{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if constexpr (std::is_integral_v<T>) {
      if (!s.empty() && s.front() == '-') throw SpecError(key, e.line, "expected a non-negative integer, got '" + s + "'");
    }
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw SpecError(key, e.line, std::string("expected ") + (std::is_integral_v<T> ? "an integer" : "a number") +
                                       ", got '" + s + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(v)) throw SpecError(key, e.line, "value must be finite");
    }
    return v;
  }
};

void read_optimizer(Reader& r, const std::string& prefix, diff::OptimizerConfig& o) {
  r.value(prefix + ".kind", [&](const std::string& v) { o.kind = diff::parse_optimizer_kind(v); });
  r.number(prefix + ".lr", o.learning_rate);
  r.number(prefix + ".beta1", o.beta1);
  r.number(prefix + ".beta2", o.beta2);
  r.number(prefix + ".epsilon", o.epsilon);
}

}  // namespace

IniDocument IniDocument::parse(std::istream& in) {
  IniDocument doc;
  std::string raw, section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw SpecError("section", line_no, "unterminated section header '" + line + "'");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_name(section)) throw SpecError("section", line_no, "bad section name '" + section + "'");
      if (!doc.sections_.emplace(section, line_no).second) {
        throw SpecError(section, line_no, "section defined twice");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw SpecError(section.empty() ? "line" : section, line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!valid_name(key)) throw SpecError(key.empty() ? "key" : key, line_no, "bad key name");
    const std::string full = section.empty() ? key : section + "." + key;
    Entry e{trim(std::string_view(line).substr(eq + 1)), line_no, false};
    if (!doc.entries_.emplace(full, e).second) {
      throw SpecError(full, line_no, "defined twice (first on line " + std::to_string(doc.entries_[full].line) + ")");
    }
  }
  return doc;
}

const IniDocument::Entry* IniDocument::take(const std::string& key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  it->second.used = true;
  return &it->second;
}

void IniDocument::reject_unused() const {
  const Entry* first = nullptr;
  std::string name;
  for (const auto& [k, e] : entries_) {
    if (!e.used && (!first || e.line < first->line)) {
      first = &e;
      name = k;
    }
  }
  if (first) throw SpecError(name, first->line, "unknown field");
}

std::size_t IniDocument::line(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

std::size_t IniDocument::section_line(const std::string& section) const {
  auto it = sections_.find(section);
  return it == sections_.end() ? 0 : it->second;
}

RunSpec parse_run_spec(std::istream& in, const std::filesystem::path& base_dir) {
  auto doc = IniDocument::parse(in);
  Reader r(doc, base_dir);
  RunSpec spec;

  r.value("run.variant", [&](const std::string& v) { spec.variant = baselines::parse_variant(v); });
  r.number("run.repetitions", spec.repetitions);
  r.number("run.seed", spec.seed);
  r.directory("run.output", spec.output);
  if (spec.repetitions < 1) throw SpecError("run.repetitions", r.line("run.repetitions"), "must be >= 1");

  auto& ds = spec.dataset;
  r.value("dataset.source", [&](const std::string& v) {
    const auto s = lower(v);
    if (s == "toy") ds.source = DataSource::Toy;
    else if (s == "csv") ds.source = DataSource::Csv;
    else if (s == "idx") ds.source = DataSource::Idx;
    else throw ConfigError("unknown source '" + v + "' (toy, csv or idx)");
  });
  r.value("dataset.preset", [&](const std::string& v) {
    data::toy_preset(v);
    ds.preset = v;
  });
  r.list("dataset.counts", ds.counts);
  r.number("dataset.test_per_class", ds.test_per_class);
  std::uint64_t data_seed = 0;
  if (r.number("dataset.seed", data_seed)) ds.seed = data_seed;
  r.boolean("dataset.standardize", ds.standardize);
  r.file("dataset.path", ds.path);
  r.file("dataset.test_path", ds.test_path);
  r.file("dataset.images", ds.images);
  r.file("dataset.labels", ds.labels);
  r.file("dataset.test_images", ds.test_images);
  r.file("dataset.test_labels", ds.test_labels);
  if (std::find(ds.counts.begin(), ds.counts.end(), 0u) != ds.counts.end()) {
    throw SpecError("dataset.counts", r.line("dataset.counts"), "counts must be positive");
  }

  switch (ds.source) {
    case DataSource::Toy: {
      const auto geo = data::toy_preset(ds.preset);
      if (ds.counts.size() != geo.classes.size()) {
        throw SpecError("dataset.counts", r.line("dataset.counts"),
                        "preset '" + ds.preset + "' has " + std::to_string(geo.classes.size()) + " classes, " +
                            std::to_string(ds.counts.size()) + " counts given");
      }
      if (ds.test_per_class == 0) throw SpecError("dataset.test_per_class", r.line("dataset.test_per_class"), "toy data needs a test set");
      break;
    }
    case DataSource::Csv:
      if (ds.path.empty()) throw SpecError("dataset.path", r.line("dataset.path"), "required for csv data");
      if (ds.test_path.empty() && (ds.test_per_class == 0 || ds.counts.empty())) {
        throw SpecError("dataset.test_path", r.line("dataset.test_path"), "give a test file or counts plus test_per_class");
      }
      break;
    case DataSource::Idx:
      if (ds.images.empty() || ds.labels.empty()) {
        throw SpecError("dataset.images", r.line("dataset.images"), "images and labels are required for idx data");
      }
      if (ds.test_images.empty() != ds.test_labels.empty()) {
        throw SpecError("dataset.test_images", r.line("dataset.test_images"), "give both test_images and test_labels");
      }
      if (ds.test_images.empty() && (ds.test_per_class == 0 || ds.counts.empty())) {
        throw SpecError("dataset.test_images", r.line("dataset.test_images"), "give test files or counts plus test_per_class");
      }
      break;
  }

  auto& ex = spec.experiment;
  r.number("model.latent", ex.generator.latent);
  r.number("model.transient", ex.generator.transient);
  r.number("model.generator_hidden", ex.generator.hidden);
  r.number("model.hidden", ex.hidden);
  r.number("model.feature_dim", ex.feature_dim);
  if (ex.generator.latent < 1 || ex.generator.transient < 1 || ex.generator.hidden < 1 || ex.hidden < 1) {
    throw SpecError("model", r.line("model"), "layer widths must be >= 1");
  }

  auto& tc = ex.train;
  r.value("train.loss", [&](const std::string& v) { tc.loss = model::parse_loss_variant(v); });
  r.number("train.batch", tc.batch);
  r.number("train.epochs", tc.epochs);
  std::size_t steps = 0;
  if (r.number("train.u", steps)) tc.u = steps;
  if (r.number("train.v", steps)) tc.v = steps;
  r.number("train.validation_fraction", tc.validation_fraction);
  r.number("train.cgan_epochs", ex.cgan_epochs);
  diff::OptimizerConfig shared;
  read_optimizer(r, "train.optimizer", shared);
  tc.opt_f = tc.opt_m = tc.opt_d = tc.opt_g = shared;
  read_optimizer(r, "train.opt_f", tc.opt_f);
  read_optimizer(r, "train.opt_m", tc.opt_m);
  read_optimizer(r, "train.opt_d", tc.opt_d);
  read_optimizer(r, "train.opt_g", tc.opt_g);
  try {
    tc.validate();
  } catch (const ConfigError& e) {
    throw SpecError("train", r.line("train"), e.what());
  }

  r.number("smote.k", ex.smote.k);
  if (ex.smote.k < 1) throw SpecError("smote.k", r.line("smote.k"), "must be >= 1");

  r.items("ablate.variants", [&](const std::string& v) { spec.ablate_variants.push_back(baselines::parse_variant(v)); });
  r.items("ablate.losses", [&](const std::string& v) { spec.ablate_losses.push_back(model::parse_loss_variant(v)); });

  doc.reject_unused();
  return spec;
}

RunSpec load_run_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("spec", 0, "cannot open " + path.string());
  return parse_run_spec(in, path.parent_path());
}

ExperimentData build_datasets(const DatasetSpec& spec, std::uint64_t seed) {
  const std::uint64_t s = spec.seed.value_or(seed);
  ExperimentData out;
  auto attach_test = [&](const data::Dataset& test_full) {
    data::Dataset test = data::Dataset::with_class_labels(test_full.features(), test_full.source_labels(),
                                                          out.train.class_labels());
    if (spec.test_per_class > 0) {
      // equal draw per class from the supplied test file
      std::vector<std::size_t> rows;
      std::mt19937_64 rng(model::mix_seed(s, 33));
      for (const auto& cls : test.class_index()) {
        if (cls.size() < spec.test_per_class) throw DataError("test file has too few rows for test_per_class");
        std::vector<std::size_t> pick = cls;
        std::shuffle(pick.begin(), pick.end(), rng);
        rows.insert(rows.end(), pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(spec.test_per_class));
      }
      std::sort(rows.begin(), rows.end());
      test = test.subset(rows);
    }
    out.test = std::move(test);
  };

  switch (spec.source) {
    case DataSource::Toy: {
      const auto geo = data::toy_preset(spec.preset);
      out.train = data::make_gaussian_toy({spec.counts, 0, model::mix_seed(s, 31)}, geo);
      const auto test =
          data::make_gaussian_toy({std::vector<std::size_t>(spec.counts.size(), spec.test_per_class), 0,
                                   model::mix_seed(s, 32)},
                                  geo);
      out.test = data::Dataset::with_class_labels(test.features(), test.source_labels(), out.train.class_labels());
      break;
    }
    case DataSource::Csv:
    case DataSource::Idx: {
      const bool csv = spec.source == DataSource::Csv;
      const auto full = csv ? data::load_csv(spec.path) : data::load_idx(spec.images, spec.labels);
      const bool separate_test = csv ? !spec.test_path.empty() : !spec.test_images.empty();
      if (separate_test) {
        out.train = spec.counts.empty() ? full : data::subsample_imbalanced(full, {spec.counts, 0, s}).train;
        attach_test(csv ? data::load_csv(spec.test_path) : data::load_idx(spec.test_images, spec.test_labels));
      } else {
        auto split = data::subsample_imbalanced(full, {spec.counts, spec.test_per_class, s});
        out.train = std::move(split.train);
        out.test = std::move(split.test);
      }
      break;
    }
  }

  if (spec.standardize) {
    const auto st = data::Standardizer::fit(out.train.features());
    out.train = out.train.with_features(st.apply(out.train.features()));
    out.test = out.test.with_features(st.apply(out.test.features()));
  }
  return out;
}

}  // namespace gamo::cli
