#pragma once

// Ranking instances and (query, positive, negative) training triples.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adcraft/corpus/pairs.hpp"

namespace adcraft::ranker {

// Keyphrases are ranked for text pairs, image tags for image pairs.
enum class RankTask { kKeyphrase, kImageTag };

std::string_view rank_task_name(RankTask task);
RankTask parse_rank_task(std::string_view name);

// Source text ++ [category token] ++ [filtered source tags].
std::vector<std::string> make_query(std::span<const std::string> text, std::string_view category,
                                    std::span<const std::string> tags, bool use_cat,
                                    bool use_img);

struct RankExample {
  std::string query_id;              // source ad id
  std::vector<std::string> text;     // source text alone, for the baselines
  std::vector<std::string> query;    // with metadata terms per the config
  std::vector<std::string> relevant; // target-side phrases or tags, sorted
};

// One example per pair. Keyphrase relevance: phrases matched in the target
// text. Tag relevance: filtered target tags.
std::vector<RankExample> rank_examples(std::span<const corpus::CreativePair> pairs, RankTask task,
                                       bool use_cat, bool use_img);

// Every filtered tag on either side of `pairs`, sorted and unique.
std::vector<std::string> tag_candidates(std::span<const corpus::CreativePair> pairs);

struct RankTriple {
  std::size_t example = 0;  // index into the examples
  std::string positive;
  std::string negative;
  bool operator==(const RankTriple&) const = default;
};

// Every relevant candidate of every example becomes a positive, paired with
// `negatives_per_positive` candidates drawn uniformly from the vocabulary
// minus the relevant set. Relevant items outside the vocabulary are skipped.
// Throws ContractError when an example leaves no candidate to sample.
std::vector<RankTriple> build_triples(std::span<const RankExample> examples,
                                      std::span<const std::string> candidates,
                                      std::size_t negatives_per_positive, std::uint64_t seed);

}  // namespace adcraft::ranker
