#pragma once

// Brute-force reference for pair construction. Materializes every ordered
// pair of records in the whole log, then filters and deduplicates by
// comparing each candidate against every other candidate.

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "adcraft/corpus/ad_record.hpp"
#include "adcraft/corpus/pairs.hpp"

namespace oracle {

using adcraft::corpus::AdRecord;
using adcraft::corpus::PairKind;

struct PairKey {
  std::string source, target;
  double lift;
  bool operator<(const PairKey& o) const {
    return std::tie(source, target) < std::tie(o.source, o.target);
  }
  bool operator==(const PairKey& o) const {
    return source == o.source && target == o.target && lift == o.lift;
  }
};

inline std::vector<PairKey> brute_force_pairs(const std::vector<AdRecord>& ads, PairKind kind,
                                              double delta, std::uint64_t min_impressions) {
  struct Cand {
    const AdRecord* s;
    const AdRecord* t;
    double lift;
    std::string key;
  };
  std::vector<Cand> all;
  for (const auto& s : ads)
    for (const auto& t : ads) {
      if (&s == &t) continue;
      if (s.ad_group_id != t.ad_group_id) continue;
      if (s.impressions <= min_impressions || t.impressions <= min_impressions) continue;
      const bool ok = kind == PairKind::kDtsi ? (s.image_id == t.image_id && s.text != t.text)
                                              : (s.text == t.text && s.image_id != t.image_id);
      if (!ok) continue;
      const double cs = double(s.clicks) / double(s.impressions);
      const double ct = double(t.clicks) / double(t.impressions);
      if (!(cs > 0) || !(cs < ct)) continue;
      const double lift = (ct - cs) / cs;
      if (!(lift * 100.0 > delta)) continue;
      std::string key = s.ad_group_id + "\x1f";
      if (kind == PairKind::kDtsi)
        for (const auto& tok : s.text) key += tok + " ";
      else
        key += s.image_id;
      all.push_back({&s, &t, lift, key});
    }
  std::vector<PairKey> out;
  for (const auto& c : all) {
    bool beaten = false;
    for (const auto& d : all) {
      if (&c == &d || c.key != d.key) continue;
      if (d.lift > c.lift ||
          (d.lift == c.lift && (d.t->ad_id < c.t->ad_id ||
                                (d.t->ad_id == c.t->ad_id && d.s->ad_id < c.s->ad_id)))) {
        beaten = true;
        break;
      }
    }
    if (!beaten) out.push_back({c.s->ad_id, c.t->ad_id, c.lift});
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<PairKey> keys_of(const std::vector<adcraft::corpus::CreativePair>& pairs) {
  std::vector<PairKey> out;
  for (const auto& p : pairs) out.push_back({p.source.ad_id, p.target.ad_id, p.rel_lift});
  std::sort(out.begin(), out.end());
  return out;
}

// Random ad-groups of up to `max_ads` ads drawn from small text/image pools
// so that shared texts, shared images and CTR ties all occur.
inline std::vector<AdRecord> random_ad_groups(std::size_t groups, std::size_t max_ads,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::vector<std::string>> texts = {
      {"great", "offers"}, {"new", "offers"}, {"free", "shipping"}, {"limited", "time"}};
  const std::uint64_t imp_choices[] = {8000, 10000, 10001, 12000, 20000, 40000};
  std::vector<AdRecord> out;
  std::size_t id = 0;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t n = 1 + rng() % max_ads;
    for (std::size_t i = 0; i < n; ++i) {
      AdRecord r;
      r.advertiser_id = "adv" + std::to_string(g % 7);
      r.category = "retail";
      r.campaign_id = "c" + std::to_string(g);
      r.ad_group_id = "g" + std::to_string(g);
      r.ad_id = "ad" + std::to_string(1000 + (id++ * 7919) % 9973);
      r.text = texts[rng() % texts.size()];
      r.image_id = "img" + std::to_string(rng() % 3);
      r.impressions = imp_choices[rng() % 6];
      r.clicks = rng() % 200;
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace oracle
