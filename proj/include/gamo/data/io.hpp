#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gamo/data/dataset.hpp"

namespace gamo::data {

// IDX image/label pair (magic 0x00000803 / 0x00000801, big-endian extents).
// Images are flattened row-major and scaled from bytes to [0, 1].
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

// CSV rows of "label,f1,...,fD". A first row that does not parse as numbers
// is taken as a header. Labels must be integers forming 0..max with no gaps.
Dataset load_csv(const std::filesystem::path& path);
Dataset read_csv(std::istream& in, const std::string& source_name = "<stream>");

// Same schema without the 0..max gap check; labels are source labels as read.
struct LabelledRows {
  Tensor features;
  std::vector<int> labels;
};
LabelledRows load_csv_rows(const std::filesystem::path& path);
LabelledRows read_csv_rows(std::istream& in, const std::string& source_name = "<stream>");

// Writes the load_csv schema with a "label,f0,..." header; labels are source
// labels, values use 17 significant digits.
void write_csv(const std::filesystem::path& path, const Dataset& data);
void write_csv(std::ostream& out, const Dataset& data);

}  // namespace gamo::data
