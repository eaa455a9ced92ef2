#include "adcraft/corpus/pairs.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "adcraft/errors.hpp"

namespace adcraft::corpus {

std::string_view pair_kind_name(PairKind kind) {
  return kind == PairKind::kDtsi ? "dtsi" : "dist";
}

PairKind parse_pair_kind(std::string_view name) {
  if (name == "dtsi" || name == "D-T-S-I") return PairKind::kDtsi;
  if (name == "dist" || name == "D-I-S-T") return PairKind::kDist;
  throw ContractError("unknown pair kind '" + std::string(name) + "'");
}

double relative_lift(double ctr_source, double ctr_target) {
  return (ctr_target - ctr_source) / ctr_source;
}

namespace {

bool kind_matches(PairKind kind, const AdRecord& s, const AdRecord& t) {
  if (kind == PairKind::kDtsi) return s.image_id == t.image_id && s.text != t.text;
  return s.text == t.text && s.image_id != t.image_id;
}

// true if `a` should survive over `b` within one dedup group
bool better(const CreativePair& a, const CreativePair& b) {
  if (a.rel_lift != b.rel_lift) return a.rel_lift > b.rel_lift;
  if (a.target.ad_id != b.target.ad_id) return a.target.ad_id < b.target.ad_id;
  return a.source.ad_id < b.source.ad_id;
}

}  // namespace

void annotate(CreativePair& pair, const KeyphraseVocabulary* vocab) {
  if (vocab) {
    pair.source_keyphrases = match_keyphrases(pair.source.text, *vocab);
    pair.target_keyphrases = match_keyphrases(pair.target.text, *vocab);
  }
  pair.source_tags = filter_image_tags(pair.source.image_tags);
  pair.target_tags = filter_image_tags(pair.target.image_tags);
}

std::vector<CreativePair> build_pairs(std::span<const AdRecord> records, PairKind kind,
                                      const PairOptions& options,
                                      const KeyphraseVocabulary* vocab) {
  std::map<std::string, std::vector<const AdRecord*>> groups;
  for (const AdRecord& r : records)
    if (r.impressions > options.min_impressions) groups[r.ad_group_id].push_back(&r);

  std::vector<CreativePair> out;
  for (auto& [group_id, ads] : groups) {
    std::sort(ads.begin(), ads.end(),
              [](const AdRecord* a, const AdRecord* b) { return a->ad_id < b->ad_id; });
    // dedup key -> best pair so far
    std::map<std::string, CreativePair> best;
    for (const AdRecord* s : ads) {
      const double cs = compute_ctr(*s);
      if (!(cs > 0.0)) continue;
      for (const AdRecord* t : ads) {
        if (s == t || !kind_matches(kind, *s, *t)) continue;
        const double ct = compute_ctr(*t);
        if (!(cs < ct)) continue;
        const double lift = relative_lift(cs, ct);
        if (!(lift * 100.0 > options.delta_percent)) continue;
        CreativePair p;
        p.kind = kind;
        p.source = *s;
        p.target = *t;
        p.rel_lift = lift;
        const std::string key =
            kind == PairKind::kDtsi ? join_tokens(s->text) : s->image_id;
        auto it = best.find(key);
        if (it == best.end())
          best.emplace(key, std::move(p));
        else if (better(p, it->second))
          it->second = std::move(p);
      }
    }
    for (auto& [key, p] : best) out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const CreativePair& a, const CreativePair& b) {
    return std::tie(a.source.ad_group_id, a.source.ad_id, a.target.ad_id) <
           std::tie(b.source.ad_group_id, b.source.ad_id, b.target.ad_id);
  });
  for (auto& p : out) annotate(p, vocab);
  return out;
}

void validate_pair(const CreativePair& pair, double delta_percent) {
  const auto fail = [&](const std::string& why) {
    throw ValidationError("pair (" + pair.source.ad_id + " -> " + pair.target.ad_id +
                          "): " + why);
  };
  if (pair.source.ad_group_id != pair.target.ad_group_id) fail("crosses ad-groups");
  if (!kind_matches(pair.kind, pair.source, pair.target))
    fail(std::string("violates ") + std::string(pair_kind_name(pair.kind)) + " constraint");
  const double cs = compute_ctr(pair.source);
  const double ct = compute_ctr(pair.target);
  if (!(cs < ct)) fail("source CTR not below target CTR");
  if (!(pair.rel_lift * 100.0 > delta_percent)) fail("lift below delta");
}

std::vector<std::string> augment_input(const CreativePair& pair, bool use_cat, bool use_img) {
  if (!use_cat && !use_img) return pair.source.text;
  std::vector<std::string> out;
  if (use_cat) out.push_back(as_token(pair.source.category));
  if (use_img) {
    std::vector<std::string> tags = pair.source_tags;
    std::sort(tags.begin(), tags.end());
    out.insert(out.end(), tags.begin(), tags.end());
  }
  out.emplace_back(kSepToken);
  out.insert(out.end(), pair.source.text.begin(), pair.source.text.end());
  return out;
}

}  // namespace adcraft::corpus
