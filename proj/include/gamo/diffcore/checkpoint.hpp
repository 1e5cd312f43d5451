#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gamo/diffcore/tensor.hpp"

namespace gamo::diff {

// Binary layout, all integers little-endian:
//   "GAMOCKPT"  u32 version  u64 manifest_bytes  manifest (UTF-8 JSON)
//   u64 entry_count, then per entry:
//   u32 name_bytes  name  u32 rank  u64 extent[rank]  f64 value[prod(extent)]
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointEntry {
  std::string name;
  Tensor value;
};

struct Checkpoint {
  nlohmann::json manifest = nlohmann::json::object();
  std::vector<CheckpointEntry> entries;

  const Tensor& at(const std::string& name) const;
  const Tensor* find(const std::string& name) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gamo::diff
