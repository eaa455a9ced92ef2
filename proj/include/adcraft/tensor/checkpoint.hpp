#pragma once

// Binary checkpoint container.
//
//   "ADCRAFTK"                      8-byte magic
//   u32 format_version
//   u32 header_bytes, header        JSON: model_kind, hyper, vocab_hashes, extras
//   u32 entry_count
//   per entry: u32 name_bytes, name, u32 rank, u64 dims[rank], f64 values[]
//
// All integers and floats are little-endian. The JSON header is dumped with
// sorted keys, so save -> load -> save reproduces the same bytes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "adcraft/tensor/tensor.hpp"
#include "json.hpp"

namespace adcraft::tensor {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct CheckpointEntry {
  std::string name;
  Shape shape;
  std::vector<double> values;
};

struct Checkpoint {
  std::uint32_t format_version = kCheckpointFormatVersion;
  std::string model_kind;
  nlohmann::json hyper = nlohmann::json::object();
  nlohmann::json vocab_hashes = nlohmann::json::object();
  nlohmann::json extras = nlohmann::json::object();
  std::vector<CheckpointEntry> entries;

  void add(const std::string& name, const Tensor& t);
  const CheckpointEntry& entry(const std::string& name) const;
  // Copies the named entry into `t`, which must already have that shape.
  void restore(const std::string& name, Tensor& t) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// 64-bit FNV-1a over the tokens, each followed by a 0x1f separator.
std::uint64_t vocab_hash(const std::vector<std::string>& tokens);
std::string hex64(std::uint64_t v);

}  // namespace adcraft::tensor
