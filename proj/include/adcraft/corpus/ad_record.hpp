#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace adcraft::corpus {

struct ImageTag {
  std::string tag;
  double score = 0.0;
  bool operator==(const ImageTag&) const = default;
};

// One ad-id: its creative plus delivery counters and account lineage.
struct AdRecord {
  std::string advertiser_id;
  std::string category;
  std::string campaign_id;
  std::string ad_group_id;
  std::string ad_id;
  std::vector<std::string> text;  // lowercased tokens
  std::string image_id;
  std::vector<ImageTag> image_tags;
  std::uint64_t impressions = 0;
  std::uint64_t clicks = 0;

  bool operator==(const AdRecord&) const = default;
};

// Lowercases, splits punctuation into standalone tokens, splits on whitespace.
std::vector<std::string> tokenize(std::string_view text);
std::string join_tokens(std::span<const std::string> tokens);
bool is_punct_token(std::string_view token);

// clicks / impressions. Throws ContractError when impressions == 0.
double compute_ctr(const AdRecord& record);

// Throws ValidationError on clicks > impressions, empty text, or a token
// holding whitespace.
void validate(const AdRecord& record);

// Single-token form of a category or tag ("real estate" -> "real_estate").
std::string as_token(std::string_view label);

}  // namespace adcraft::corpus
