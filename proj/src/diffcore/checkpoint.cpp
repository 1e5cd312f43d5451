#include "gamo/diffcore/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "gamo/error.hpp"

namespace gamo::diff {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'A', 'M', 'O', 'C', 'K', 'P', 'T'};

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> buf;
  for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(buf.data(), buf.size());
}

template <typename U>
U get_le(std::istream& in, const char* what) {
  std::array<unsigned char, sizeof(U)> buf;
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
    throw DataError(std::string("checkpoint truncated while reading ") + what);
  }
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
  return v;
}

std::string get_bytes(std::istream& in, std::uint64_t n, const char* what) {
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n))) {
    throw DataError(std::string("checkpoint truncated while reading ") + what);
  }
  return s;
}

}  // namespace

const Tensor* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e.value;
  return nullptr;
}

const Tensor& Checkpoint::at(const std::string& name) const {
  if (const auto* t = find(name)) return *t;
  throw DataError("checkpoint has no entry '" + name + "'");
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kCheckpointVersion);
  const std::string manifest = ckpt.manifest.dump();
  put_le<std::uint64_t>(out, manifest.size());
  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  put_le<std::uint64_t>(out, ckpt.entries.size());
  for (const auto& e : ckpt.entries) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.value.rank()));
    for (auto extent : e.value.shape()) put_le<std::uint64_t>(out, extent);
    for (double v : e.value.values()) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw Error("failed writing checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw DataError("not a checkpoint (bad magic)");
  const auto version = get_le<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  const auto manifest_bytes = get_le<std::uint64_t>(in, "manifest size");
  const std::string manifest = get_bytes(in, manifest_bytes, "manifest");
  try {
    ckpt.manifest = nlohmann::json::parse(manifest);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint manifest is not valid JSON: ") + e.what());
  }
  const auto count = get_le<std::uint64_t>(in, "entry count");
  for (std::uint64_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    const auto name_bytes = get_le<std::uint32_t>(in, "entry name size");
    e.name = get_bytes(in, name_bytes, "entry name");
    const auto rank = get_le<std::uint32_t>(in, "rank");
    if (rank > 8) throw DataError("checkpoint entry '" + e.name + "' has implausible rank");
    Tensor::Shape shape(rank);
    for (auto& extent : shape) extent = get_le<std::uint64_t>(in, "extent");
    std::vector<double> values(element_count(shape));
    for (auto& v : values) v = std::bit_cast<double>(get_le<std::uint64_t>(in, "values"));
    e.value = Tensor(std::move(shape), std::move(values));
    ckpt.entries.push_back(std::move(e));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace gamo::diff
