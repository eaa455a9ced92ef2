#include "adcraft/cli/gradient_suite.hpp"

#include <random>

#include "adcraft/generator/model.hpp"
#include "adcraft/generator/vocab.hpp"
#include "adcraft/ranker/model.hpp"
#include "adcraft/tensor/ops.hpp"

namespace adcraft::cli {

namespace {

// Default init is small; spread the weights so every path carries signal.
template <typename Named>
void spread(Named named, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (auto& [name, t] : named)
    for (double& v : t.mutable_values()) v = u(rng);
}

std::vector<std::string> random_words(std::mt19937_64& rng, const std::vector<std::string>& pool,
                                      std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len), pick(0, pool.size() - 1);
  std::vector<std::string> out(len(rng));
  for (auto& w : out) w = pool[pick(rng)];
  return out;
}

SuiteResult generator_check(std::uint64_t seed, bool copy, const tensor::GradCheckOptions& opt) {
  using namespace generator;
  std::mt19937_64 rng(seed);
  const GenVocab vocab({"great", "offers", "free", "shipping", "today", "now"});
  // two words outside the vocabulary exercise the extended ids
  const std::vector<std::string> pool{"great", "offers", "free", "shipping",
                                      "today", "now",    "acme", "zeta"};
  GenHyper h;
  h.embed_dim = 4;
  h.hidden = 3;
  h.copy = copy;
  GenModelParams p = init_params(h, vocab.size(), seed);
  spread(p.named(), rng);
  std::vector<GenExample> batch;
  for (int i = 0; i < 2; ++i)
    batch.push_back(
        make_example(vocab, random_words(rng, pool, 2, 4), random_words(rng, pool, 1, 3)));
  auto f = [&] {
    std::vector<tensor::Tensor> losses;
    for (const auto& ex : batch) losses.push_back(sequence_loss(p, ex));
    return tensor::mean(tensor::concat(losses));
  };
  auto named = p.named_trainable();
  return {copy ? "generator" : "generator-nocopy", tensor::grad_check(f, named, opt)};
}

SuiteResult ranker_check(std::uint64_t seed, const tensor::GradCheckOptions& opt) {
  using namespace ranker;
  std::mt19937_64 rng(seed + 1);
  RankHyper h;
  h.embed_dim = 5;
  h.hidden = {4, 3};
  h.k = 3;
  const std::size_t terms = 12;
  RankModelParams p = init_rank_params(h, terms, seed);
  spread(p.named(), rng);
  std::uniform_int_distribution<std::size_t> term(1, terms - 1), len(1, 4);
  auto ids = [&] {
    std::vector<std::size_t> v(len(rng));
    for (auto& x : v) x = term(rng);
    return v;
  };
  struct Triple {
    std::vector<std::size_t> q, pos, neg;
  };
  std::vector<Triple> triples;
  while (triples.size() < 3) {
    Triple t{ids(), ids(), ids()};
    tensor::NoGradGuard ng;
    // keep the hinge active so every tensor receives gradient
    if (hinge_loss(score(p, t.q, t.pos), score(p, t.q, t.neg)).item() > 1e-3)
      triples.push_back(std::move(t));
  }
  auto f = [&] {
    std::vector<tensor::Tensor> losses;
    for (const auto& t : triples)
      losses.push_back(hinge_loss(score(p, t.q, t.pos), score(p, t.q, t.neg)));
    return tensor::mean(tensor::concat(losses));
  };
  auto named = p.named();
  return {"ranker", tensor::grad_check(f, named, opt)};
}

}  // namespace

std::vector<SuiteResult> gradient_suite(std::uint64_t seed,
                                        const tensor::GradCheckOptions& options) {
  return {generator_check(seed, true, options), generator_check(seed, false, options),
          ranker_check(seed, options)};
}

}  // namespace adcraft::cli
