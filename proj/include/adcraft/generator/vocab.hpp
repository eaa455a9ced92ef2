#pragma once

// Fixed generator vocabulary and per-example extended ids.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace adcraft::generator {

inline constexpr std::size_t kPad = 0;
inline constexpr std::size_t kBos = 1;
inline constexpr std::size_t kEos = 2;
inline constexpr std::size_t kUnk = 3;
inline constexpr std::size_t kSep = 4;
inline constexpr std::size_t kNumSpecials = 5;

class GenVocab {
 public:
  // Specials only.
  GenVocab();
  // Specials followed by `tokens` in the given order. Throws ContractError on
  // duplicates or a token that collides with a special.
  explicit GenVocab(std::vector<std::string> tokens);

  // Tokens with frequency >= min_freq across `texts`, most frequent first,
  // ties lexicographic.
  static GenVocab build(std::span<const std::vector<std::string>> texts, std::size_t min_freq);

  std::size_t size() const { return tokens_.size(); }
  // UNK for unknown tokens.
  std::size_t id(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::size_t id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::uint64_t hash() const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One training or decoding instance. Source tokens missing from the fixed
// vocabulary get extended ids V, V+1, ... in order of first appearance.
struct GenExample {
  std::vector<std::size_t> source_ids;      // fixed vocab, UNK for OOV
  std::vector<std::size_t> source_ext_ids;  // fixed vocab plus per-example OOV slots
  std::vector<std::string> ext_oov_tokens;
  // BOS y1 .. yT EOS. Target OOVs found in the source use their ext id,
  // others UNK. Empty for decode-only examples.
  std::vector<std::size_t> target_ext_ids;

  std::size_t n_ext() const { return ext_oov_tokens.size(); }
};

GenExample make_example(const GenVocab& vocab, std::span<const std::string> source,
                        std::span<const std::string> target);
GenExample make_source_example(const GenVocab& vocab, std::span<const std::string> source);

// Maps an extended id back to its string.
std::string resolve_token(const GenVocab& vocab, const GenExample& ex, std::size_t ext_id);

}  // namespace adcraft::generator
