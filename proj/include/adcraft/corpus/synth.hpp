#pragma once

// Seeded synthetic ad logs with planted CTR signals.
//
// Each category has "boost" openers, benefits and image tags that raise an
// ad's CTR and "weak" ones that lower it. Ad-groups hold text variants on a
// shared image and image variants on a shared text, so both pair kinds occur.
// Advertisers carry a unique brand token that most of their texts repeat.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adcraft/corpus/ad_record.hpp"

namespace adcraft::corpus {

struct SynthConfig {
  std::uint64_t seed = 7;
  std::size_t advertisers = 60;
  std::size_t campaigns_per_advertiser = 2;
  std::size_t ad_groups_per_campaign = 3;
  std::size_t min_ads_per_group = 3;
  std::size_t max_ads_per_group = 6;
  std::uint64_t min_impressions = 6000;
  std::uint64_t max_impressions = 60000;
  double ctr_noise = 0.03;  // sigma of the multiplicative log-normal noise
};

std::vector<AdRecord> synthesize_ads(const SynthConfig& config);

// Every token the synthesizer can emit for `config`, plus category and tag
// tokens, sorted and unique.
std::vector<std::string> synthetic_lexicon(const SynthConfig& config);

// Word vectors "word v1 ... vd" for the lexicon. Words from one category
// share a common direction so averaged vectors carry weak topical signal.
void write_synthetic_embeddings(std::ostream& out, const SynthConfig& config,
                                std::size_t dim = 16);

std::vector<std::string> synthetic_categories();

}  // namespace adcraft::corpus
