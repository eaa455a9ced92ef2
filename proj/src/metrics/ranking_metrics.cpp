#include "adcraft/metrics/ranking_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "adcraft/errors.hpp"

namespace adcraft::metrics {

namespace {

void check(std::span<const std::string> relevant, std::size_t k) {
  if (k == 0) throw ContractError("ranking metrics need k >= 1");
  if (relevant.empty()) throw ContractError("ranking metrics need a non-empty relevant set");
}

}  // namespace

double dcg_at_k(std::span<const std::string> ranked, std::span<const std::string> relevant,
                std::size_t k) {
  const std::set<std::string> rel(relevant.begin(), relevant.end());
  double dcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i)
    if (rel.contains(ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg;
}

RankScores rank_scores(std::span<const std::string> ranked,
                       std::span<const std::string> relevant, std::size_t k) {
  check(relevant, k);
  const std::set<std::string> rel(relevant.begin(), relevant.end());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) hits += rel.contains(ranked[i]);
  double ideal = 0.0;
  for (std::size_t i = 0; i < std::min(k, rel.size()); ++i)
    ideal += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  RankScores s;
  s.precision = static_cast<double>(hits) / static_cast<double>(k);
  s.recall = static_cast<double>(hits) / static_cast<double>(rel.size());
  s.ndcg = dcg_at_k(ranked, relevant, k) / ideal;
  return s;
}

RankEvalReport evaluate_ranking(std::span<const RankQuery> queries) {
  RankEvalReport rep;
  for (const auto& q : queries) {
    if (q.relevant.empty()) continue;
    const RankScores a = rank_scores(q.ranked, q.relevant, 5);
    const RankScores b = rank_scores(q.ranked, q.relevant, 10);
    rep.p5 += a.precision;
    rep.r5 += a.recall;
    rep.ndcg5 += a.ndcg;
    rep.p10 += b.precision;
    rep.r10 += b.recall;
    rep.ndcg10 += b.ndcg;
    ++rep.queries;
  }
  if (rep.queries) {
    const double n = static_cast<double>(rep.queries);
    for (double* v : {&rep.p5, &rep.p10, &rep.r5, &rep.r10, &rep.ndcg5, &rep.ndcg10}) *v /= n;
  }
  return rep;
}

}  // namespace adcraft::metrics
