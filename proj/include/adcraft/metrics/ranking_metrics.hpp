#pragma once

// Top-k retrieval metrics with binary relevance.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace adcraft::metrics {

struct RankScores {
  double precision = 0.0, recall = 0.0, ndcg = 0.0;
};

// `ranked` is best-first. Gains are 1 for relevant items, discounts
// 1 / log2(i + 1) at 1-based rank i, and the ideal list puts
// min(|relevant|, k) relevant items on top. When fewer than k items are
// ranked, P@k still divides by k.
// Throws ContractError if k == 0 or `relevant` is empty.
RankScores rank_scores(std::span<const std::string> ranked,
                       std::span<const std::string> relevant, std::size_t k);

double dcg_at_k(std::span<const std::string> ranked, std::span<const std::string> relevant,
                std::size_t k);

struct RankQuery {
  std::vector<std::string> ranked;
  std::vector<std::string> relevant;
};

struct RankEvalReport {
  double p5 = 0.0, p10 = 0.0, r5 = 0.0, r10 = 0.0, ndcg5 = 0.0, ndcg10 = 0.0;
  std::size_t queries = 0;  // queries with a non-empty relevant set
};

// Means over queries; queries without relevant items are skipped.
RankEvalReport evaluate_ranking(std::span<const RankQuery> queries);

}  // namespace adcraft::metrics
