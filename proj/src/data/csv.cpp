#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include "gamo/data/io.hpp"
#include "gamo/error.hpp"

namespace gamo::data {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

}  // namespace

LabelledRows read_csv_rows(std::istream& in, const std::string& source_name) {
  std::vector<int> labels;
  std::vector<double> values;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto view = trim(line);
    if (view.empty()) continue;
    const auto cells = split_commas(view);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t k = 0; k < cells.size(); ++k) numeric = numeric && parse_double(cells[k], row[k]);
    if (first_row) {
      first_row = false;
      if (!numeric) continue;  // header
    }
    if (!numeric) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        double tmp;
        if (!parse_double(cells[k], tmp)) {
          throw DataError(source_name + ":" + std::to_string(line_no) + ": non-numeric cell '" +
                          std::string(cells[k]) + "' in column " + std::to_string(k + 1));
        }
      }
    }
    if (cells.size() < 2) throw DataError(source_name + ":" + std::to_string(line_no) + ": row has no features");
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": ragged row with " +
                      std::to_string(cells.size()) + " cells, expected " + std::to_string(width));
    }
    const double l = row[0];
    if (l < 0 || l != std::floor(l)) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": label must be a nonnegative integer");
    }
    labels.push_back(static_cast<int>(l));
    values.insert(values.end(), row.begin() + 1, row.end());
  }
  if (labels.empty()) throw DataError(source_name + ": no data rows");
  return {Tensor(Tensor::Shape{labels.size(), width - 1}, std::move(values)), std::move(labels)};
}

Dataset read_csv(std::istream& in, const std::string& source_name) {
  auto [features, labels] = read_csv_rows(in, source_name);
  const std::set<int> distinct(labels.begin(), labels.end());
  const int max_label = *distinct.rbegin();
  if (static_cast<std::size_t>(max_label) + 1 != distinct.size()) {
    for (int l = 0; l <= max_label; ++l) {
      if (!distinct.count(l)) {
        throw DataError(source_name + ": label " + std::to_string(l) + " never appears (labels must be 0.." +
                        std::to_string(max_label) + ")");
      }
    }
  }
  return Dataset::from_source_labels(std::move(features), labels);
}

LabelledRows load_csv_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv_rows(in, path.string());
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_csv(in, path.string());
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << "label";
  for (std::size_t j = 0; j < data.dim(); ++j) out << ",f" << j;
  out << '\n';
  const auto src = data.source_labels();
  char buf[32];
  for (std::size_t r = 0; r < data.size(); ++r) {
    out << src[r];
    for (double v : data.features().row(r)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_csv(out, data);
}

}  // namespace gamo::data
