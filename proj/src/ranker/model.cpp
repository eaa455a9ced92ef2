#include "adcraft/ranker/model.hpp"

#include <algorithm>
#include <random>

#include "adcraft/errors.hpp"
#include "adcraft/tensor/ops.hpp"

namespace adcraft::ranker {

namespace ops = adcraft::tensor;

TermVocab::TermVocab() : TermVocab(std::vector<std::string>{}) {}

TermVocab::TermVocab(std::vector<std::string> terms) {
  terms_.push_back("<unk>");
  terms_.insert(terms_.end(), terms.begin(), terms.end());
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (!index_.emplace(terms_[i], i).second)
      throw ContractError("ranker vocabulary: duplicate term '" + terms_[i] + "'");
}

std::size_t TermVocab::id(std::string_view term) const {
  auto it = index_.find(std::string(term));
  return it == index_.end() ? 0 : it->second;
}

std::vector<std::size_t> TermVocab::ids(std::span<const std::string> terms) const {
  std::vector<std::size_t> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(id(t));
  return out;
}

std::vector<tensor::NamedTensor> RankModelParams::named() const {
  std::vector<tensor::NamedTensor> out{{"embedding", embedding}};
  for (std::size_t l = 0; l < mlp_w.size(); ++l) {
    out.emplace_back("mlp_w" + std::to_string(l), mlp_w[l]);
    out.emplace_back("mlp_b" + std::to_string(l), mlp_b[l]);
  }
  out.emplace_back("out_w", out_w);
  out.emplace_back("out_b", out_b);
  out.emplace_back("w_g", w_g);
  return out;
}

std::vector<Tensor> RankModelParams::all() const {
  std::vector<Tensor> out;
  for (auto& nt : named()) out.push_back(nt.second);
  return out;
}

RankModelParams init_rank_params(const RankHyper& hyper, std::size_t n_terms,
                                 std::uint64_t seed) {
  if (hyper.k == 0) throw ContractError("ranker: k must be positive");
  std::mt19937_64 rng(seed);
  RankModelParams p;
  p.hyper = hyper;
  p.embedding = Tensor::uniform({n_terms, hyper.embed_dim}, -0.1, 0.1, rng);
  std::size_t in = hyper.k;
  for (std::size_t h : hyper.hidden) {
    p.mlp_w.push_back(Tensor::uniform({in, h}, -0.1, 0.1, rng));
    p.mlp_b.push_back(Tensor::zeros({h}, true));
    in = h;
  }
  p.out_w = Tensor::uniform({in}, -0.1, 0.1, rng);
  p.out_b = Tensor::zeros({1}, true);
  p.w_g = Tensor::uniform({hyper.embed_dim}, -0.1, 0.1, rng);
  return p;
}

Tensor interaction_topk(const Tensor& query_emb, const Tensor& candidate_emb, std::size_t k) {
  return ops::topk_rows(ops::cosine_matrix(query_emb, candidate_emb), k, kInteractionPad);
}

Tensor term_gates(const RankModelParams& params, std::span<const std::size_t> query_ids) {
  if (query_ids.empty()) throw ContractError("ranker: empty query");
  return ops::softmax(ops::matmul(ops::embedding_lookup(params.embedding, query_ids), params.w_g));
}

Tensor mlp(const RankModelParams& params, const Tensor& interactions) {
  Tensor x = interactions;
  for (std::size_t l = 0; l < params.mlp_w.size(); ++l)
    x = ops::tanh(ops::add(ops::matmul(x, params.mlp_w[l]), params.mlp_b[l]));
  return ops::add(ops::matmul(x, params.out_w), params.out_b);
}

Tensor score(const RankModelParams& params, std::span<const std::size_t> query_ids,
             std::span<const std::size_t> candidate_ids) {
  if (query_ids.empty()) throw ContractError("ranker: empty query");
  if (candidate_ids.empty()) throw ContractError("ranker: empty candidate");
  Tensor q = ops::embedding_lookup(params.embedding, query_ids);
  Tensor c = ops::embedding_lookup(params.embedding, candidate_ids);
  Tensor per_term = mlp(params, interaction_topk(q, c, params.hyper.k));
  Tensor g = ops::softmax(ops::matmul(q, params.w_g));
  return ops::dot(g, per_term);
}

Tensor hinge_loss(const Tensor& s_pos, const Tensor& s_neg) {
  return ops::relu(ops::add_scalar(ops::sub(s_neg, s_pos), 1.0));
}

void sort_ranked(RankedList& list) {
  std::sort(list.begin(), list.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
}

RankedList top_k(RankedList list, std::size_t k) {
  if (list.size() > k) list.resize(k);
  return list;
}

}  // namespace adcraft::ranker
