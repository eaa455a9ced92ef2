#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "adcraft/errors.hpp"
#include "adcraft/ranker/baselines.hpp"
#include "adcraft/ranker/model.hpp"
#include "adcraft/ranker/train.hpp"
#include "adcraft/ranker/triples.hpp"
#include "adcraft/tensor/ops.hpp"
#include "doctest.h"

using namespace adcraft;
using namespace adcraft::ranker;
using adcraft::tensor::Tensor;

namespace {

RankModelParams random_params(std::size_t terms, std::size_t k, std::uint64_t seed) {
  RankHyper h;
  h.embed_dim = 5;
  h.hidden = {4, 3};
  h.k = k;
  auto p = init_rank_params(h, terms, seed);
  std::mt19937_64 rng(seed * 7 + 1);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (auto& [name, t] : p.named())
    for (double& v : t.mutable_values()) v = u(rng);
  return p;
}

std::vector<double> row(const Tensor& table, std::size_t r) {
  const std::size_t d = table.dim(1);
  return {table.values().begin() + r * d, table.values().begin() + (r + 1) * d};
}

double hand_cos(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i], aa += a[i] * a[i], bb += b[i] * b[i];
  return ab / std::sqrt(aa * bb);
}

// The model's forward pass written out with plain loops.
double hand_score(const RankModelParams& p, const std::vector<std::size_t>& q,
                  const std::vector<std::size_t>& c) {
  const std::size_t k = p.hyper.k;
  std::vector<double> logits, outs;
  for (std::size_t qi : q) {
    const auto qe = row(p.embedding, qi);
    std::vector<double> sims;
    for (std::size_t ci : c) sims.push_back(hand_cos(qe, row(p.embedding, ci)));
    std::sort(sims.rbegin(), sims.rend());
    sims.resize(k, -1.0);
    std::vector<double> x = sims;
    for (std::size_t l = 0; l < p.mlp_w.size(); ++l) {
      const std::size_t in = p.mlp_w[l].dim(0), out = p.mlp_w[l].dim(1);
      std::vector<double> y(out);
      for (std::size_t j = 0; j < out; ++j) {
        double z = p.mlp_b[l][j];
        for (std::size_t i = 0; i < in; ++i) z += x[i] * p.mlp_w[l].at(i, j);
        y[j] = std::tanh(z);
      }
      x = y;
    }
    double o = p.out_b[0];
    for (std::size_t i = 0; i < x.size(); ++i) o += x[i] * p.out_w[i];
    outs.push_back(o);
    double gl = 0;
    for (std::size_t i = 0; i < qe.size(); ++i) gl += qe[i] * p.w_g[i];
    logits.push_back(gl);
  }
  double z = 0;
  for (double l : logits) z += std::exp(l);
  double s = 0;
  for (std::size_t i = 0; i < q.size(); ++i) s += std::exp(logits[i]) / z * outs[i];
  return s;
}

}  // namespace

TEST_CASE("interaction top-k") {
  auto p = random_params(8, 3, 1);
  auto emb = [&](std::vector<std::size_t> ids) { return tensor::embedding_lookup(p.embedding, ids); };
  auto one = interaction_topk(emb({2}), emb({5}), 3);
  CHECK(one.shape() == tensor::Shape{1, 3});
  CHECK(one[0] == doctest::Approx(hand_cos(row(p.embedding, 2), row(p.embedding, 5))));
  CHECK(one[1] == -1.0);
  CHECK(one[2] == -1.0);
  auto self = interaction_topk(emb({4}), emb({1, 4, 6}), 3);
  CHECK(self[0] == doctest::Approx(1.0).epsilon(1e-14));

  for (std::size_t q = 0; q < 8; ++q) {
    std::vector<std::size_t> cand = {0, 3, 5, 7};
    auto got = interaction_topk(emb({q}), emb(cand), 2);
    std::vector<double> sims;
    for (std::size_t c : cand) sims.push_back(hand_cos(row(p.embedding, q), row(p.embedding, c)));
    std::sort(sims.rbegin(), sims.rend());
    CHECK(got[0] == doctest::Approx(sims[0]).epsilon(1e-13));
    CHECK(got[1] == doctest::Approx(sims[1]).epsilon(1e-13));
  }
}

TEST_CASE("score assembly") {
  auto p = random_params(9, 4, 2);
  SUBCASE("single-term query is the MLP output") {
    std::vector<std::size_t> q = {3}, c = {1, 6};
    auto g = term_gates(p, q);
    CHECK(g[0] == 1.0);
    auto topk = interaction_topk(tensor::embedding_lookup(p.embedding, q),
                                 tensor::embedding_lookup(p.embedding, c), 4);
    CHECK(score(p, q, c).item() == doctest::Approx(mlp(p, topk)[0]).epsilon(1e-14));
  }
  SUBCASE("zero gate weights give uniform gates") {
    for (double& v : p.w_g.mutable_values()) v = 0.0;
    std::vector<std::size_t> q = {1, 2, 3, 4};
    const Tensor gates = term_gates(p, q);
    REQUIRE(gates.size() == 4);
    for (double g : gates.values()) CHECK(g == 0.25);
  }
  SUBCASE("three-term query matches the hand-chained computation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      auto r = random_params(9, 4, 10 + seed);
      std::vector<std::size_t> q = {1, 4, 7}, c = {2, 4, 8};
      CHECK(score(r, q, c).item() == doctest::Approx(hand_score(r, q, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gates form a distribution and score ignores ordering") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_params(12, 3, 50 + trial);
    std::vector<std::size_t> q(1 + rng() % 6), c(1 + rng() % 4);
    for (auto& x : q) x = rng() % 12;
    for (auto& x : c) x = rng() % 12;
    auto g = term_gates(p, q);
    double total = 0;
    for (double x : g.values()) {
      CHECK(x >= 0.0);
      total += x;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    const double s = score(p, q, c).item();
    auto q2 = q, c2 = c;
    std::shuffle(q2.begin(), q2.end(), rng);
    std::shuffle(c2.begin(), c2.end(), rng);
    CHECK(score(p, q2, c2).item() == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("hinge loss values") {
  auto h = [](double a, double b) { return hinge_loss(Tensor::scalar(a), Tensor::scalar(b)).item(); };
  CHECK(h(2.0, 0.5) == 0.0);
  CHECK(h(0.2, 0.5) == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(h(0.7, 0.7) == 1.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng), b = u(rng);
    CHECK(h(a, b) >= 0.0);
    CHECK((h(a, b) == 0.0) == (a - b >= 1.0));
  }
}

TEST_CASE("hinge gradients match finite differences") {
  auto p = random_params(10, 3, 7);
  const std::vector<std::vector<std::size_t>> q = {{1, 2, 3}, {4, 5}, {6}};
  const std::vector<std::vector<std::size_t>> pos = {{7, 8}, {9}, {2, 3}};
  const std::vector<std::vector<std::size_t>> neg = {{4}, {1, 6}, {8, 9, 5}};
  auto f = [&] {
    std::vector<Tensor> losses;
    for (std::size_t i = 0; i < q.size(); ++i)
      losses.push_back(hinge_loss(score(p, q[i], pos[i]), score(p, q[i], neg[i])));
    return tensor::mean(tensor::concat(losses));
  };
  {
    tensor::NoGradGuard ng;
    for (std::size_t i = 0; i < q.size(); ++i)
      REQUIRE(hinge_loss(score(p, q[i], pos[i]), score(p, q[i], neg[i])).item() > 0.0);
  }
  auto named = p.named();
  auto report = tensor::grad_check(f, named);
  CHECK(report.params.size() == 8);
  for (const auto& pc : report.params) {
    INFO(pc.name << " " << pc.max_rel_error);
    CHECK(pc.max_rel_error < 1e-4);
  }
}

TEST_CASE("satisfied margin contributes no gradient") {
  auto p = random_params(6, 2, 3);
  std::vector<std::size_t> q = {1, 2}, c1 = {3}, c2 = {4};
  Tensor sp = score(p, q, c1), sn = score(p, q, c2);
  Tensor loss = hinge_loss(tensor::add_scalar(sp, 5.0), sn);
  CHECK(loss.item() == 0.0);
  tensor::backward(loss);
  for (const auto& t : p.all())
    for (double g : t.grad()) CHECK(g == 0.0);
}

TEST_CASE("triples") {
  std::vector<std::string> vocab;
  for (int i = 0; i < 99; ++i) vocab.push_back("phrase" + std::to_string(i));
  vocab.push_back("free shipping");
  std::vector<RankExample> ex(1);
  ex[0].query = {"great", "offers"};
  ex[0].relevant = {"free shipping"};
  auto t = build_triples(ex, vocab, 4, 9);
  REQUIRE(t.size() == 4);
  for (const auto& tr : t) {
    CHECK(tr.positive == "free shipping");
    CHECK(tr.negative != "free shipping");
  }
  CHECK(build_triples(ex, vocab, 4, 9) == t);
  CHECK(build_triples(ex, vocab, 0, 9).empty());
  std::vector<std::string> tiny = {"free shipping"};
  CHECK_THROWS_AS(build_triples(ex, tiny, 1, 9), ContractError);
}

TEST_CASE("queries take metadata terms") {
  std::vector<std::string> text = {"great", "offers"}, tags = {"face", "woman"};
  CHECK(make_query(text, "real estate", tags, true, true) ==
        std::vector<std::string>{"great", "offers", "real_estate", "face", "woman"});
  CHECK(make_query(text, "retail", tags, false, false) == text);
}

namespace {

RankModel trained_toy(std::size_t epochs, double lr, std::uint64_t seed = 1) {
  std::vector<RankExample> ex;
  const std::vector<std::string> brands = {"acme", "zeta", "omni", "nova"};
  for (std::size_t i = 0; i < 12; ++i) {
    RankExample e;
    e.query = {"buy", brands[i % 4], "shoes"};
    e.relevant = {"free shipping", brands[i % 4]};
    std::sort(e.relevant.begin(), e.relevant.end());
    ex.push_back(e);
  }
  std::vector<std::string> cands = {"acme", "big sale", "free shipping", "nova", "omni",
                                    "shoes", "weekly deals", "zeta"};
  RankTrainConfig cfg;
  cfg.model.embed_dim = 6;
  cfg.model.hidden = {5};
  cfg.model.k = 3;
  cfg.epochs = epochs;
  cfg.learning_rate = lr;
  cfg.batch_size = 4;
  cfg.seed = seed;
  return train_ranker(ex, cands, cfg).model;
}

}  // namespace

TEST_CASE("ranking contracts") {
  auto m = trained_toy(10, 0.05);
  std::vector<std::string> q = {"buy", "zeta", "shoes"};
  auto ranked = m.rank(q);
  CHECK(ranked.size() == m.candidates.size());
  std::set<std::string> seen;
  for (const auto& r : ranked) seen.insert(r.text);
  CHECK(seen == std::set<std::string>(m.candidates.begin(), m.candidates.end()));
  for (std::size_t i = 1; i < ranked.size(); ++i) CHECK(ranked[i - 1].score >= ranked[i].score);
  // exhaustive score-then-sort
  RankedList direct;
  for (const auto& c : m.candidates) direct.push_back({c, m.score_candidate(q, c)});
  std::stable_sort(direct.begin(), direct.end(), [](const auto& a, const auto& b) {
    return a.score > b.score || (a.score == b.score && a.text < b.text);
  });
  CHECK(ranked == direct);
  // the learned signal
  std::set<std::string> top2 = {ranked[0].text, ranked[1].text};
  CHECK(top2 == std::set<std::string>{"free shipping", "zeta"});

  auto single = m;
  single.candidates = {"nova"};
  single.candidate_ids = {m.terms.ids(std::vector<std::string>{"nova"})};
  CHECK(single.rank(q).size() == 1);

  auto flat = m;
  for (double& v : flat.params.out_w.mutable_values()) v = 0.0;
  auto tied = flat.rank(q);
  for (std::size_t i = 1; i < tied.size(); ++i) CHECK(tied[i - 1].text < tied[i].text);
}

TEST_CASE("ranker with 50 candidates orders by exhaustive scoring") {
  auto p = random_params(60, 4, 99);
  RankModel m;
  std::vector<std::string> words;
  for (int i = 0; i < 59; ++i) words.push_back("w" + std::to_string(100 + i));
  m.terms = TermVocab(words);
  m.params = p;
  for (int i = 0; i < 50; ++i) {
    m.candidates.push_back(words[i] + (i % 3 ? "" : " " + words[(i * 7) % 59]));
    m.candidate_ids.push_back(m.terms.ids(candidate_terms(m.candidates.back())));
  }
  std::vector<std::string> q = {"w101", "w120", "w140"};
  auto ranked = m.rank(q);
  for (std::size_t i = 0; i < ranked.size(); ++i)
    for (std::size_t j = i + 1; j < ranked.size(); ++j) {
      CHECK(ranked[i].score >= ranked[j].score);
      if (ranked[i].score == ranked[j].score) CHECK(ranked[i].text < ranked[j].text);
    }
}

TEST_CASE("ranker training contracts") {
  auto frozen = trained_toy(2, 0.0);
  auto fresh = init_rank_params(frozen.config.model, frozen.terms.size(), frozen.config.seed);
  auto a = frozen.params.named(), b = fresh.named();
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::equal(a[i].second.values().begin(), a[i].second.values().end(),
                     b[i].second.values().begin()));
  auto bytes = [](const RankModel& m) {
    std::ostringstream os;
    tensor::write_checkpoint(os, m.to_checkpoint());
    return os.str();
  };
  auto m1 = trained_toy(3, 0.05), m2 = trained_toy(3, 0.05);
  CHECK(bytes(m1) == bytes(m2));
  std::istringstream in(bytes(m1));
  auto back = RankModel::from_checkpoint(tensor::read_checkpoint(in));
  CHECK(bytes(back) == bytes(m1));
  CHECK(back.version() == m1.version());
  std::vector<std::string> q = {"buy", "acme", "shoes"};
  CHECK(back.rank(q) == m1.rank(q));
}

TEST_CASE("embedding similarity baseline") {
  WordVectors wv;
  wv.add("great", {1, 0, 0});
  wv.add("offers", {0, 1, 0});
  wv.add("shoes", {0, 0, 1});
  wv.add("boots", {1, 1, 0});
  wv.add("sale", {1, 2, 2});
  std::vector<std::string> q = {"great", "offers"};
  std::vector<std::string> cands = {"shoes", "great offers", "boots", "sale", "great"};
  auto r = baseline_emb_sim(wv, q, cands);
  // query mean (0.5, 0.5, 0)
  auto find = [&](const std::string& t) {
    for (auto& x : r) if (x.text == t) return x.score;
    return -9.0;
  };
  CHECK(find("shoes") == 0.0);
  CHECK(find("great offers") == doctest::Approx(1.0));
  CHECK(find("boots") == doctest::Approx(1.0));
  CHECK(find("sale") == doctest::Approx(3.0 / (std::sqrt(0.5) * 3.0) * 0.5));
  CHECK(find("great") == doctest::Approx(0.5 / std::sqrt(0.5)));
  CHECK((r[0].text == "boots" || r[0].text == "great offers"));
  std::vector<std::string> oov = {"unknown"};
  auto z = baseline_emb_sim(wv, oov, cands);
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(z[i].score == 0.0);
    if (i) CHECK(z[i - 1].text < z[i].text);
  }
  std::istringstream file("a 1 2\nb 3 4\n");
  auto loaded = WordVectors::read(file);
  CHECK(loaded.dim() == 2);
  std::istringstream bad("a 1 2\nb 3\n");
  CHECK_THROWS_AS(WordVectors::read(bad), ParseError);
}

TEST_CASE("tf-idf baseline") {
  std::vector<std::vector<std::string>> docs = {
      {"free", "shipping", "today"}, {"free", "returns"}, {"big", "sale", "today"}};
  TfidfIndex idx(docs);
  const double idf_free = std::log(4.0 / 3.0) + 1, idf_ship = std::log(4.0 / 2.0) + 1,
               idf_new = std::log(4.0) + 1;
  CHECK(idx.idf("free") == doctest::Approx(idf_free));
  CHECK(idx.idf("never") == doctest::Approx(idf_new));
  std::vector<std::string> q = {"free", "shipping", "free"};
  std::vector<std::string> cands = {"free shipping", "big sale", "free shipping free", "shipping"};
  auto r = baseline_tfidf(idx, q, cands);
  auto find = [&](const std::string& t) {
    for (auto& x : r) if (x.text == t) return x.score;
    return -9.0;
  };
  const double qf = 2 * idf_free, qs = idf_ship;
  const double qn = std::sqrt(qf * qf + qs * qs);
  CHECK(find("big sale") == 0.0);
  CHECK(find("free shipping free") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(find("free shipping") ==
        doctest::Approx((qf * idf_free + qs * idf_ship) /
                        (qn * std::sqrt(idf_free * idf_free + idf_ship * idf_ship))));
  CHECK(find("shipping") == doctest::Approx(qs / qn));
  CHECK(r[0].text == "free shipping free");
}
