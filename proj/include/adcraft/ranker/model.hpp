#pragma once

// DRMM top-k relevance model. Each query term is compared by cosine with
// every candidate term; the k largest similarities feed a shared MLP, and the
// per-term outputs are combined with softmax gates over the query terms.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adcraft/tensor/grad_check.hpp"
#include "adcraft/tensor/tensor.hpp"

namespace adcraft::ranker {

using tensor::Tensor;

inline constexpr double kInteractionPad = -1.0;

// Term ids for the ranker embedding table. Id 0 is <unk>.
class TermVocab {
 public:
  TermVocab();
  explicit TermVocab(std::vector<std::string> terms);  // without <unk>

  std::size_t size() const { return terms_.size(); }
  std::size_t id(std::string_view term) const;
  const std::string& term(std::size_t id) const { return terms_.at(id); }
  // All terms after <unk>.
  std::vector<std::string> words() const { return {terms_.begin() + 1, terms_.end()}; }
  std::vector<std::size_t> ids(std::span<const std::string> terms) const;

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct RankHyper {
  std::size_t embed_dim = 32;
  std::vector<std::size_t> hidden = {16, 16};
  std::size_t k = 20;
};

struct RankModelParams {
  RankHyper hyper;
  Tensor embedding;                  // [T, d]
  std::vector<Tensor> mlp_w, mlp_b;  // layer l: [in_l, out_l], [out_l]; in_0 = k
  Tensor out_w, out_b;               // [h_last], [1]
  Tensor w_g;                        // [d]

  std::vector<tensor::NamedTensor> named() const;
  std::vector<Tensor> all() const;
};

RankModelParams init_rank_params(const RankHyper& hyper, std::size_t n_terms,
                                 std::uint64_t seed);

// Cosine of each query row [n,d] against each candidate row [m,d], sorted
// descending per row and cut or padded with -1 to k columns -> [n,k].
Tensor interaction_topk(const Tensor& query_emb, const Tensor& candidate_emb, std::size_t k);

// softmax over query terms of w_g . emb(q_i) -> [n]
Tensor term_gates(const RankModelParams& params, std::span<const std::size_t> query_ids);

// tanh hidden layers, linear scalar output, applied row-wise: [n,k] -> [n]
Tensor mlp(const RankModelParams& params, const Tensor& interactions);

// s = sum_i g_i * MLP(topk(q_i, candidate)) -> [1]
Tensor score(const RankModelParams& params, std::span<const std::size_t> query_ids,
             std::span<const std::size_t> candidate_ids);

// max(0, 1 - s_pos + s_neg) -> [1]
Tensor hinge_loss(const Tensor& s_pos, const Tensor& s_neg);

struct RankedItem {
  std::string text;
  double score = 0.0;
  bool operator==(const RankedItem&) const = default;
};
using RankedList = std::vector<RankedItem>;

// Descending score, ties by text.
void sort_ranked(RankedList& list);
RankedList top_k(RankedList list, std::size_t k);

}  // namespace adcraft::ranker
