#include "adcraft/ranker/triples.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "adcraft/corpus/ad_record.hpp"
#include "adcraft/errors.hpp"

namespace adcraft::ranker {

std::string_view rank_task_name(RankTask task) {
  return task == RankTask::kKeyphrase ? "keyphrase" : "tag";
}

RankTask parse_rank_task(std::string_view name) {
  if (name == "keyphrase") return RankTask::kKeyphrase;
  if (name == "tag") return RankTask::kImageTag;
  throw ContractError("unknown ranking task '" + std::string(name) + "' (expected keyphrase|tag)");
}

std::vector<std::string> make_query(std::span<const std::string> text, std::string_view category,
                                    std::span<const std::string> tags, bool use_cat,
                                    bool use_img) {
  std::vector<std::string> q(text.begin(), text.end());
  if (use_cat) q.push_back(corpus::as_token(category));
  if (use_img) q.insert(q.end(), tags.begin(), tags.end());
  if (q.empty()) throw ContractError("ranker: empty query");
  return q;
}

std::vector<RankExample> rank_examples(std::span<const corpus::CreativePair> pairs, RankTask task,
                                       bool use_cat, bool use_img) {
  std::vector<RankExample> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    RankExample ex;
    ex.query_id = p.source.ad_id;
    ex.text = p.source.text;
    ex.query = make_query(p.source.text, p.source.category, p.source_tags, use_cat, use_img);
    ex.relevant = task == RankTask::kKeyphrase ? p.target_keyphrases : p.target_tags;
    std::sort(ex.relevant.begin(), ex.relevant.end());
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<std::string> tag_candidates(std::span<const corpus::CreativePair> pairs) {
  std::set<std::string> tags;
  for (const auto& p : pairs) {
    tags.insert(p.source_tags.begin(), p.source_tags.end());
    tags.insert(p.target_tags.begin(), p.target_tags.end());
  }
  return {tags.begin(), tags.end()};
}

std::vector<RankTriple> build_triples(std::span<const RankExample> examples,
                                      std::span<const std::string> candidates,
                                      std::size_t negatives_per_positive, std::uint64_t seed) {
  std::vector<RankTriple> out;
  if (negatives_per_positive == 0) return out;
  std::mt19937_64 rng(seed);
  const std::set<std::string> vocab(candidates.begin(), candidates.end());
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const std::set<std::string> rel(examples[e].relevant.begin(), examples[e].relevant.end());
    std::vector<std::string> pool;
    for (const auto& c : candidates)
      if (!rel.contains(c)) pool.push_back(c);
    for (const auto& pos : examples[e].relevant) {
      if (!vocab.contains(pos)) continue;
      if (pool.empty())
        throw ContractError("build_triples: vocabulary of " + std::to_string(candidates.size()) +
                            " leaves no negatives for " + std::to_string(rel.size()) +
                            " relevant items");
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      for (std::size_t n = 0; n < negatives_per_positive; ++n)
        out.push_back({e, pos, pool[pick(rng)]});
    }
  }
  return out;
}

}  // namespace adcraft::ranker
