#include <array>
#include <cstdint>
#include <fstream>

#include "gamo/data/io.hpp"
#include "gamo/error.hpp"

namespace gamo::data {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& file) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw DataError(file + ": truncated IDX header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::vector<unsigned char> read_body(std::istream& in, std::size_t n, const std::string& file) {
  std::vector<unsigned char> buf(n);
  if (n && !in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n))) {
    throw DataError(file + ": truncated IDX payload (expected " + std::to_string(n) + " bytes)");
  }
  return buf;
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const std::string img_name = images.string(), lbl_name = labels.string();
  std::ifstream img(images, std::ios::binary);
  if (!img) throw DataError("cannot open " + img_name);
  std::ifstream lbl(labels, std::ios::binary);
  if (!lbl) throw DataError("cannot open " + lbl_name);

  if (const auto m = read_be32(img, img_name); m != kImageMagic) {
    throw DataError(img_name + ": bad magic number " + std::to_string(m) + " for an IDX image file");
  }
  const std::size_t n_images = read_be32(img, img_name);
  const std::size_t rows = read_be32(img, img_name);
  const std::size_t cols = read_be32(img, img_name);

  if (const auto m = read_be32(lbl, lbl_name); m != kLabelMagic) {
    throw DataError(lbl_name + ": bad magic number " + std::to_string(m) + " for an IDX label file");
  }
  const std::size_t n_labels = read_be32(lbl, lbl_name);
  if (n_images != n_labels) {
    throw DataError("IDX count mismatch: " + std::to_string(n_images) + " images vs " + std::to_string(n_labels) +
                    " labels");
  }

  const std::size_t d = rows * cols;
  const auto pixels = read_body(img, n_images * d, img_name);
  const auto raw_labels = read_body(lbl, n_labels, lbl_name);

  Tensor features = Tensor::matrix(n_images, d);
  for (std::size_t i = 0; i < pixels.size(); ++i) features[i] = static_cast<double>(pixels[i]) / 255.0;
  std::vector<int> source(raw_labels.begin(), raw_labels.end());
  return Dataset::from_source_labels(std::move(features), source);
}

}  // namespace gamo::data
