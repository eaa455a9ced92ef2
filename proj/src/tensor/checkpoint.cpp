#include "adcraft/tensor/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "adcraft/errors.hpp"

namespace adcraft::tensor {
namespace {

constexpr std::array<char, 8> kMagic = {'A', 'D', 'C', 'R', 'A', 'F', 'T', 'K'};

template <typename U>
void put_le(std::ostream& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i)
    out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename U>
U get_le(std::istream& in) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    const int c = in.get();
    if (c == EOF) throw ContractError("checkpoint: truncated stream");
    v |= static_cast<U>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in) {
  const auto n = get_le<std::uint32_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (static_cast<std::uint32_t>(in.gcount()) != n)
    throw ContractError("checkpoint: truncated string");
  return s;
}

}  // namespace

void Checkpoint::add(const std::string& name, const Tensor& t) {
  entries.push_back({name, t.shape(), std::vector<double>(t.values().begin(), t.values().end())});
}

const CheckpointEntry& Checkpoint::entry(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw ContractError("checkpoint has no entry '" + name + "'");
}

void Checkpoint::restore(const std::string& name, Tensor& t) const {
  const CheckpointEntry& e = entry(name);
  if (e.shape != t.shape())
    throw DimensionError("checkpoint entry '" + name + "' has shape " + shape_str(e.shape) +
                         ", expected " + shape_str(t.shape()));
  std::copy(e.values.begin(), e.values.end(), t.mutable_values().begin());
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, ckpt.format_version);
  nlohmann::json header = {{"model_kind", ckpt.model_kind},
                           {"hyper", ckpt.hyper},
                           {"vocab_hashes", ckpt.vocab_hashes},
                           {"extras", ckpt.extras}};
  put_string(out, header.dump());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.entries.size()));
  for (const auto& e : ckpt.entries) {
    put_string(out, e.name);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(e.shape.size()));
    for (std::size_t d : e.shape) put_le<std::uint64_t>(out, d);
    for (double v : e.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw ContractError("checkpoint: write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != static_cast<std::streamsize>(magic.size()) || magic != kMagic)
    throw ContractError("checkpoint: bad magic");
  Checkpoint ckpt;
  ckpt.format_version = get_le<std::uint32_t>(in);
  if (ckpt.format_version != kCheckpointFormatVersion)
    throw ContractError("checkpoint: unsupported format version " +
                        std::to_string(ckpt.format_version));
  const auto header = nlohmann::json::parse(get_string(in));
  ckpt.model_kind = header.at("model_kind").get<std::string>();
  ckpt.hyper = header.at("hyper");
  ckpt.vocab_hashes = header.at("vocab_hashes");
  ckpt.extras = header.at("extras");
  const auto count = get_le<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < count; ++i) {
    CheckpointEntry e;
    e.name = get_string(in);
    const auto rank = get_le<std::uint32_t>(in);
    for (std::uint32_t r = 0; r < rank; ++r)
      e.shape.push_back(static_cast<std::size_t>(get_le<std::uint64_t>(in)));
    e.values.resize(shape_size(e.shape));
    for (double& v : e.values) v = std::bit_cast<double>(get_le<std::uint64_t>(in));
    ckpt.entries.push_back(std::move(e));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ContractError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContractError("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

std::uint64_t vocab_hash(const std::vector<std::string>& tokens) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (const auto& t : tokens) {
    for (char c : t) mix(static_cast<unsigned char>(c));
    mix(0x1f);
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace adcraft::tensor
