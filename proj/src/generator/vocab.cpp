#include "adcraft/generator/vocab.hpp"

#include <algorithm>
#include <map>

#include "adcraft/errors.hpp"
#include "adcraft/tensor/checkpoint.hpp"

namespace adcraft::generator {

namespace {
const std::vector<std::string> kSpecials = {"<pad>", "<bos>", "<eos>", "<unk>", "<sep>"};
}  // namespace

GenVocab::GenVocab() : GenVocab(std::vector<std::string>{}) {}

GenVocab::GenVocab(std::vector<std::string> tokens) {
  tokens_ = kSpecials;
  tokens_.insert(tokens_.end(), tokens.begin(), tokens.end());
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    if (!index_.emplace(tokens_[i], i).second)
      throw ContractError("generator vocabulary: duplicate token '" + tokens_[i] + "'");
}

GenVocab GenVocab::build(std::span<const std::vector<std::string>> texts, std::size_t min_freq) {
  std::map<std::string, std::size_t> freq;
  for (const auto& t : texts)
    for (const auto& tok : t) ++freq[tok];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (const auto& [tok, n] : freq)
    if (n >= min_freq && std::find(kSpecials.begin(), kSpecials.end(), tok) == kSpecials.end())
      kept.emplace_back(tok, n);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  for (auto& [tok, n] : kept) tokens.push_back(tok);
  return GenVocab(std::move(tokens));
}

std::size_t GenVocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool GenVocab::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

const std::string& GenVocab::token(std::size_t id) const {
  if (id >= tokens_.size())
    throw ContractError("generator vocabulary: id " + std::to_string(id) + " out of range");
  return tokens_[id];
}

std::uint64_t GenVocab::hash() const { return tensor::vocab_hash(tokens_); }

GenExample make_source_example(const GenVocab& vocab, std::span<const std::string> source) {
  GenExample ex;
  for (const auto& tok : source) {
    const std::size_t id = vocab.id(tok);
    ex.source_ids.push_back(id);
    if (id != kUnk || tok == vocab.token(kUnk)) {
      ex.source_ext_ids.push_back(id);
      continue;
    }
    auto it = std::find(ex.ext_oov_tokens.begin(), ex.ext_oov_tokens.end(), tok);
    if (it == ex.ext_oov_tokens.end()) {
      ex.ext_oov_tokens.push_back(tok);
      it = ex.ext_oov_tokens.end() - 1;
    }
    ex.source_ext_ids.push_back(vocab.size() + (it - ex.ext_oov_tokens.begin()));
  }
  return ex;
}

GenExample make_example(const GenVocab& vocab, std::span<const std::string> source,
                        std::span<const std::string> target) {
  GenExample ex = make_source_example(vocab, source);
  ex.target_ext_ids.push_back(kBos);
  for (const auto& tok : target) {
    std::size_t id = vocab.id(tok);
    if (id == kUnk) {
      auto it = std::find(ex.ext_oov_tokens.begin(), ex.ext_oov_tokens.end(), tok);
      if (it != ex.ext_oov_tokens.end())
        id = vocab.size() + (it - ex.ext_oov_tokens.begin());
    }
    ex.target_ext_ids.push_back(id);
  }
  ex.target_ext_ids.push_back(kEos);
  return ex;
}

std::string resolve_token(const GenVocab& vocab, const GenExample& ex, std::size_t ext_id) {
  if (ext_id < vocab.size()) return vocab.token(ext_id);
  const std::size_t slot = ext_id - vocab.size();
  if (slot >= ex.ext_oov_tokens.size())
    throw ContractError("extended id " + std::to_string(ext_id) + " beyond " +
                        std::to_string(ex.ext_oov_tokens.size()) + " source OOV slots");
  return ex.ext_oov_tokens[slot];
}

}  // namespace adcraft::generator
