#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adcraft/corpus/ad_record.hpp"
#include "adcraft/corpus/keyphrases.hpp"

namespace adcraft::corpus {

// kDtsi: different text, same image. kDist: different image, same text.
enum class PairKind { kDtsi, kDist };

std::string_view pair_kind_name(PairKind kind);
PairKind parse_pair_kind(std::string_view name);

// Ordered (inferior, superior) creatives from one ad-group.
struct CreativePair {
  PairKind kind = PairKind::kDtsi;
  AdRecord source;
  AdRecord target;
  double rel_lift = 0.0;  // (ctr_t - ctr_s) / ctr_s
  std::vector<std::string> source_keyphrases;
  std::vector<std::string> target_keyphrases;
  std::vector<std::string> source_tags;
  std::vector<std::string> target_tags;

  bool operator==(const CreativePair&) const = default;
};

struct PairOptions {
  double delta_percent = 10.0;
  std::uint64_t min_impressions = 10000;
};

double relative_lift(double ctr_source, double ctr_target);

// Builds pairs of one kind:
//   1. drops ads with impressions <= min_impressions;
//   2. inside each ad-group, every ordered (source, target) meeting the kind
//      constraint with ctr(source) < ctr(target) and ctr(source) > 0;
//   3. keeps rel_lift * 100 > delta_percent;
//   4. per ad-group and dedup key (source text for D-T-S-I, source image for
//      D-I-S-T) keeps the max-lift pair; ties go to the smaller target ad_id,
//      then the smaller source ad_id;
//   5. annotates keyphrases (when `vocab` is given) and filtered tags.
// Output is sorted by (ad_group_id, source ad_id) and independent of input order.
std::vector<CreativePair> build_pairs(std::span<const AdRecord> records, PairKind kind,
                                      const PairOptions& options,
                                      const KeyphraseVocabulary* vocab = nullptr);

// Fills the keyphrase and tag annotations in place.
void annotate(CreativePair& pair, const KeyphraseVocabulary* vocab);

// Throws ValidationError if the pair breaks any structural invariant.
void validate_pair(const CreativePair& pair, double delta_percent);

inline constexpr std::string_view kSepToken = "<sep>";

// [category if use_cat] ++ [source tags, sorted, if use_img] ++ [<sep>] ++ text.
// With neither flag set the source text comes back unchanged.
std::vector<std::string> augment_input(const CreativePair& pair, bool use_cat, bool use_img);

}  // namespace adcraft::corpus
