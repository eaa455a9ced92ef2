#include "adcraft/corpus/ad_record.hpp"

#include <cctype>

#include "adcraft/errors.hpp"

namespace adcraft::corpus {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      tokens.emplace_back(1, static_cast<char>(c));
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

bool is_punct_token(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token)
    if (!std::ispunct(static_cast<unsigned char>(c))) return false;
  return true;
}

double compute_ctr(const AdRecord& record) {
  if (record.impressions == 0)
    throw ContractError("ad " + record.ad_id + ": CTR undefined with zero impressions");
  return static_cast<double>(record.clicks) / static_cast<double>(record.impressions);
}

void validate(const AdRecord& record) {
  if (record.clicks > record.impressions)
    throw ValidationError("ad " + record.ad_id + ": clicks (" + std::to_string(record.clicks) +
                          ") exceed impressions (" + std::to_string(record.impressions) + ")");
  if (record.text.empty()) throw ValidationError("ad " + record.ad_id + ": empty text");
  for (const auto& tok : record.text)
    for (char c : tok)
      if (std::isspace(static_cast<unsigned char>(c)))
        throw ValidationError("ad " + record.ad_id + ": token with whitespace");
  for (const auto& t : record.image_tags)
    if (!(t.score >= 0.0 && t.score <= 1.0))
      throw ValidationError("ad " + record.ad_id + ": tag '" + t.tag +
                            "' confidence outside [0,1]");
}

std::string as_token(std::string_view label) {
  std::string out;
  for (char raw : label) {
    const auto c = static_cast<unsigned char>(raw);
    out.push_back(std::isspace(c) ? '_' : static_cast<char>(std::tolower(c)));
  }
  return out;
}

}  // namespace adcraft::corpus
