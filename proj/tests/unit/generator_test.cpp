#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "adcraft/errors.hpp"
#include "adcraft/generator/decode.hpp"
#include "adcraft/generator/model.hpp"
#include "adcraft/generator/train.hpp"
#include "adcraft/generator/vocab.hpp"
#include "adcraft/tensor/grad_check.hpp"
#include "adcraft/tensor/ops.hpp"
#include "doctest.h"
#include "text_corpus.hpp"

using namespace adcraft;
using namespace adcraft::generator;
using adcraft::tensor::Tensor;

namespace {

GenVocab small_vocab() { return GenVocab({"great", "offers", "free", "shipping", "today"}); }

GenModelParams tiny_model(std::size_t vocab_size, std::uint64_t seed = 3, bool copy = true) {
  GenHyper h;
  h.embed_dim = 4;
  h.hidden = 3;
  h.copy = copy;
  auto p = init_params(h, vocab_size, seed);
  // larger weights than the default init so the oracles see non-trivial values
  std::mt19937_64 rng(seed + 100);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  for (auto& [name, t] : p.named())
    for (double& v : t.mutable_values()) v = u(rng);
  return p;
}

std::vector<double> vals(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

// log P of the full id sequence, stepped by hand through decoder_step.
double sequence_log_prob(const GenModelParams& p, const GenExample& ex,
                         const std::vector<std::size_t>& ids, const StepOptions& opt = {}) {
  tensor::NoGradGuard ng;
  Encoding enc = encode(p, ex.source_ids);
  LstmState st = enc.init;
  std::size_t prev = kBos;
  double lp = 0.0;
  for (std::size_t id : ids) {
    auto step = decoder_step(p, enc, ex, prev, st, opt);
    lp += std::log(std::max(step.dist[id], kLossFloor));
    st = step.state;
    prev = id;
  }
  return lp;
}

}  // namespace

TEST_CASE("vocabulary layout") {
  auto v = small_vocab();
  CHECK(v.size() == 10);
  CHECK(v.token(kPad) == "<pad>");
  CHECK(v.token(kSep) == "<sep>");
  CHECK(v.id("great") == 5);
  CHECK(v.id("nope") == kUnk);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v.id(v.token(i)) == i);
  CHECK_THROWS_AS(GenVocab({"a", "a"}), ContractError);

  std::vector<std::vector<std::string>> texts = {{"b", "a", "b"}, {"c", "a", "b"}, {"d"}};
  auto built = GenVocab::build(texts, 2);
  CHECK(built.tokens() ==
        std::vector<std::string>{"<pad>", "<bos>", "<eos>", "<unk>", "<sep>", "b", "a"});
}

TEST_CASE("examples carry extended ids for source OOVs") {
  auto v = small_vocab();
  std::vector<std::string> src = {"acme", "great", "offers", "acme", "zeta"};
  std::vector<std::string> tgt = {"acme", "free", "omega"};
  auto ex = make_example(v, src, tgt);
  CHECK(ex.source_ids == std::vector<std::size_t>{kUnk, 5, 6, kUnk, kUnk});
  CHECK(ex.source_ext_ids == std::vector<std::size_t>{10, 5, 6, 10, 11});
  CHECK(ex.ext_oov_tokens == std::vector<std::string>{"acme", "zeta"});
  CHECK(ex.target_ext_ids == std::vector<std::size_t>{kBos, 10, 7, kUnk, kEos});
  CHECK(resolve_token(v, ex, 11) == "zeta");
  CHECK_THROWS_AS(resolve_token(v, ex, 12), ContractError);
}

TEST_CASE("encode shapes and totality") {
  auto p = tiny_model(10);
  std::vector<std::size_t> ids = {5, 6, 7, 8};
  auto enc = encode(p, ids);
  CHECK(enc.states.shape() == tensor::Shape{4, 6});
  CHECK(enc.init.h.size() == 3);
  std::vector<std::size_t> pad = {kPad};
  auto e1 = encode(p, pad);
  for (double x : e1.states.values()) CHECK(std::isfinite(x));
  std::vector<std::size_t> bad = {10};
  CHECK_THROWS_AS(encode(p, bad), ContractError);
  CHECK_THROWS_AS(encode(p, std::vector<std::size_t>{}), ContractError);
}

TEST_CASE("encoder reversal swaps forward and backward components") {
  auto p = tiny_model(10);
  auto q = tiny_model(10);
  std::swap(q.enc_fwd_w, q.enc_bwd_w);
  std::swap(q.enc_fwd_b, q.enc_bwd_b);
  std::vector<std::size_t> ids = {5, 9, 6, 7, 5};
  std::vector<std::size_t> rev(ids.rbegin(), ids.rend());
  auto a = encode(p, ids).states;
  auto b = encode(q, rev).states;
  const std::size_t n = ids.size(), h = 3;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < h; ++j) {
      CHECK(b.at(i, j) == a.at(n - 1 - i, h + j));
      CHECK(b.at(i, h + j) == a.at(n - 1 - i, j));
    }
}

TEST_CASE("attention weights and context") {
  auto p = tiny_model(10);
  std::mt19937_64 rng(5);
  SUBCASE("identical states give uniform weights") {
    Encoding enc;
    enc.states = Tensor::from({4, 6}, std::vector<double>(24, 0.3));
    enc.att_keys = tensor::matmul(enc.states, p.w_att);
    auto att = attend(p, enc, Tensor::vector({0.2, -0.5, 0.9}));
    for (double a : att.weights.values()) CHECK(a == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("one state") {
    Encoding enc;
    enc.states = Tensor::from({1, 6}, {1, 2, 3, 4, 5, 6});
    enc.att_keys = tensor::matmul(enc.states, p.w_att);
    auto att = attend(p, enc, Tensor::vector({0.2, -0.5, 0.9}));
    CHECK(att.weights[0] == 1.0);
    CHECK(vals(att.context) == vals(enc.states));
  }
  SUBCASE("random five states match a hand-computed weighted sum") {
    Encoding enc;
    enc.states = Tensor::uniform({5, 6}, -1, 1, rng, false);
    enc.att_keys = tensor::matmul(enc.states, p.w_att);
    Tensor s = Tensor::uniform({3}, -1, 1, rng, false);
    auto att = attend(p, enc, s);
    std::vector<double> e(5, 0.0);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t k = 0; k < 3; ++k) e[i] += enc.states.at(i, j) * p.w_att.at(j, k) * s[k];
    double z = 0.0;
    for (double x : e) z += std::exp(x);
    for (std::size_t j = 0; j < 6; ++j) {
      double c = 0.0;
      for (std::size_t i = 0; i < 5; ++i) c += std::exp(e[i]) / z * enc.states.at(i, j);
      CHECK(att.context[j] == doctest::Approx(c).epsilon(1e-12));
    }
  }
}

TEST_CASE("generation probability") {
  auto p = tiny_model(10);
  Tensor c = Tensor::vector({0.1, 0.2, 0.3, -0.4, 0.5, 0.6});
  Tensor s = Tensor::vector({0.7, -0.8, 0.9});
  Tensor x = Tensor::vector({1.0, -1.1, 1.2, 0.3});
  double z = p.b_ptr[0];
  for (std::size_t i = 0; i < 6; ++i) z += p.w_c[i] * c[i];
  for (std::size_t i = 0; i < 3; ++i) z += p.w_s[i] * s[i];
  for (std::size_t i = 0; i < 4; ++i) z += p.w_x[i] * x[i];
  CHECK(generation_prob(p, c, s, x).item() == doctest::Approx(1 / (1 + std::exp(-z))));

  for (auto* t : {&p.w_c, &p.w_s, &p.w_x, &p.b_ptr})
    for (double& v : t->mutable_values()) v = 0.0;
  CHECK(generation_prob(p, c, s, x).item() == 0.5);
  p.b_ptr.mutable_values()[0] = 20.0;
  CHECK(generation_prob(p, c, s, x).item() > 0.999);
}

TEST_CASE("mixture distribution") {
  Tensor pv = Tensor::vector({0.1, 0.2, 0.3, 0.15, 0.25});
  Tensor a = Tensor::vector({0.5, 0.2, 0.3});
  std::vector<std::size_t> src = {4, 5, 4};  // id 5 is the one extended slot

  auto pure_gen = mixture_dist(Tensor::scalar(1.0), pv, a, src, 1);
  CHECK(vals(pure_gen) == std::vector<double>{0.1, 0.2, 0.3, 0.15, 0.25, 0.0});

  auto pure_copy = mixture_dist(Tensor::scalar(0.0), pv, a, src, 1);
  CHECK(pure_copy[4] == doctest::Approx(0.8));
  CHECK(pure_copy[5] == doctest::Approx(0.2));
  for (std::size_t y = 0; y < 4; ++y) CHECK(pure_copy[y] == 0.0);

  auto half = mixture_dist(Tensor::scalar(0.5), pv, a, src, 1);
  for (std::size_t y = 0; y < 6; ++y) {
    double want = y < 5 ? 0.5 * pv[y] : 0.0;
    for (std::size_t i = 0; i < src.size(); ++i)
      if (src[i] == y) want += 0.5 * a[i];
    CHECK(half[y] == doctest::Approx(want).epsilon(1e-15));
  }
  double total = 0.0;
  for (double x : half.values()) total += x;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(mixture_dist(Tensor::scalar(0.5), pv, a, src, 0), ContractError);
}

TEST_CASE("step distributions are normalized and copy keeps OOV mass") {
  auto v = small_vocab();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto p = tiny_model(v.size(), 100 + trial);
    std::vector<std::string> src = {"acme", "great", "zeta", "offers"};
    auto ex = make_example(v, src, std::vector<std::string>{"acme"});
    tensor::NoGradGuard ng;
    auto enc = encode(p, ex.source_ids);
    auto step = decoder_step(p, enc, ex, rng() % 12, enc.init);
    double total = 0.0;
    for (double x : step.dist.values()) total += x;
    CHECK(std::abs(total - 1.0) < 1e-9);
    CHECK(step.p_gen.item() > 0.0);
    CHECK(step.p_gen.item() < 1.0);
    CHECK(step.dist[10] > 0.0);  // "acme", outside the fixed vocabulary
    auto forced = decoder_step(p, enc, ex, kBos, enc.init, {0.0});
    std::set<std::size_t> support;
    for (std::size_t y = 0; y < forced.dist.size(); ++y)
      if (forced.dist[y] > 0.0) support.insert(y);
    CHECK(support == std::set<std::size_t>(ex.source_ext_ids.begin(), ex.source_ext_ids.end()));
  }
}

TEST_CASE("sequence loss") {
  auto v = small_vocab();
  SUBCASE("one-hot distribution gives zero loss") {
    auto p = tiny_model(v.size());
    std::vector<std::string> src = {"<eos>"};
    auto ex = make_example(v, src, std::vector<std::string>{});
    CHECK(sequence_loss(p, ex, {0.0}).item() == 0.0);
  }
  SUBCASE("uniform distribution gives log N per step") {
    auto p = tiny_model(v.size());
    for (auto* t : {&p.vp_w, &p.vp_b})
      for (double& x : t->mutable_values()) x = 0.0;
    std::vector<std::string> src = {"great", "offers"};
    std::vector<std::string> tgt = {"free", "shipping", "today"};
    auto ex = make_example(v, src, tgt);
    CHECK(sequence_loss(p, ex, {1.0}).item() == doctest::Approx(std::log(10.0)).epsilon(1e-13));
  }
  SUBCASE("random model equals step-wise accumulation") {
    auto p = tiny_model(v.size(), 9);
    std::vector<std::string> src = {"acme", "great", "offers"};
    std::vector<std::string> tgt = {"acme", "free"};  // T = 3 with EOS
    auto ex = make_example(v, src, tgt);
    std::vector<std::size_t> gold(ex.target_ext_ids.begin() + 1, ex.target_ext_ids.end());
    REQUIRE(gold.size() == 3);
    tensor::NoGradGuard ng;
    auto enc = encode(p, ex.source_ids);
    LstmState st = enc.init;
    double acc = 0.0;
    std::size_t prev = kBos;
    for (std::size_t y : gold) {
      auto step = decoder_step(p, enc, ex, prev, st);
      const double pg = step.p_gen.item();
      double py = y < v.size() ? pg * step.p_vocab[y] : 0.0;
      for (std::size_t i = 0; i < ex.source_ext_ids.size(); ++i)
        if (ex.source_ext_ids[i] == y) py += (1 - pg) * step.attention.weights[i];
      acc += -std::log(py);
      st = step.state;
      prev = y;
    }
    CHECK(sequence_loss(p, ex).item() == doctest::Approx(acc / 3.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(sequence_loss(tiny_model(v.size()), make_source_example(v, std::vector<std::string>{"a"})),
                  ContractError);
}

TEST_CASE("sequence loss gradients match finite differences") {
  auto v = small_vocab();
  for (bool copy : {true, false}) {
    auto p = tiny_model(v.size(), 21, copy);
    std::vector<GenExample> batch = {
        make_example(v, std::vector<std::string>{"acme", "great", "offers"},
                     std::vector<std::string>{"acme", "free", "shipping"}),
        make_example(v, std::vector<std::string>{"free", "zeta"},
                     std::vector<std::string>{"today", "zeta"})};
    auto f = [&] {
      return tensor::scale(tensor::add(sequence_loss(p, batch[0]), sequence_loss(p, batch[1])),
                           0.5);
    };
    auto named = p.named_trainable();
    auto report = tensor::grad_check(f, named);
    CHECK(report.params.size() == (copy ? 20u : 16u));
    for (const auto& pc : report.params) {
      INFO(pc.name << " rel err " << pc.max_rel_error);
      CHECK(pc.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("decoding contracts") {
  auto v = small_vocab();
  auto p = tiny_model(v.size(), 4);
  std::vector<std::string> src = {"acme", "great", "offers", "today"};
  auto ex = make_source_example(v, src);

  auto g = greedy_decode(p, v, ex, {8});
  auto b1 = beam_decode(p, v, ex, 1, {8});
  REQUIRE(b1.size() == 1);
  CHECK(b1[0].ids == g.ids);
  CHECK(b1[0].log_prob == g.log_prob);
  CHECK(g.log_prob == doctest::Approx(sequence_log_prob(p, ex, g.ids)).epsilon(1e-12));
  for (std::size_t id : g.ids) CHECK(emittable(id));

  auto one = greedy_decode(p, v, ex, {1});
  CHECK(one.ids.size() == 1);
  CHECK(one.tokens.size() <= 1);

  auto copy_only = greedy_decode(p, v, ex, {10, 0.0});
  for (const auto& t : copy_only.tokens)
    CHECK(std::find(src.begin(), src.end(), t) != src.end());

  auto beams = beam_decode(p, v, ex, 4, {6});
  CHECK(beams.size() == 4);
  for (std::size_t i = 1; i < beams.size(); ++i)
    CHECK(beams[i - 1].normalized() >= beams[i].normalized());
  for (const auto& r : beams)
    CHECK(r.log_prob == doctest::Approx(sequence_log_prob(p, ex, r.ids)).epsilon(1e-12));
  CHECK_THROWS_AS(beam_decode(p, v, ex, 0), ContractError);
}

TEST_CASE("wide beam equals exhaustive enumeration") {
  GenVocab v({"x", "y"});
  auto p = tiny_model(v.size(), 8);
  auto ex = make_source_example(v, std::vector<std::string>{"x", "y", "x"});
  const std::size_t max_len = 3;
  // every emittable sequence that ends in EOS or reaches max_len
  std::vector<std::size_t> alphabet;
  for (std::size_t y = 0; y < v.size(); ++y)
    if (emittable(y)) alphabet.push_back(y);
  std::vector<std::pair<double, std::vector<std::size_t>>> all;
  std::vector<std::vector<std::size_t>> frontier = {{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& pre : frontier)
      for (std::size_t y : alphabet) {
        auto seq = pre;
        seq.push_back(y);
        if (y == kEos || len == max_len)
          all.emplace_back(sequence_log_prob(p, ex, seq) / double(seq.size()), seq);
        else
          next.push_back(seq);
      }
    frontier = next;
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  // branching 3 over 3 steps never exceeds 27 live hypotheses
  auto beams = beam_decode(p, v, ex, 64, {max_len});
  REQUIRE(beams.size() == all.size());
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(beams[i].ids == all[i].second);
    CHECK(beams[i].normalized() == doctest::Approx(all[i].first).epsilon(1e-12));
  }
  // a narrow beam returns genuine sequences with correct scores
  auto narrow = beam_decode(p, v, ex, 4, {max_len});
  for (const auto& r : narrow) {
    bool found = false;
    for (const auto& [score, seq] : all)
      if (seq == r.ids) found = score == doctest::Approx(r.normalized()).epsilon(1e-12);
    CHECK(found);
  }
}

TEST_CASE("training contracts") {
  textcorpus::Config tc;
  tc.pairs = 6;
  auto pairs = textcorpus::make(tc);
  GenTrainConfig cfg;
  cfg.model.embed_dim = 6;
  cfg.model.hidden = 5;
  cfg.min_freq = 1;
  cfg.epochs = 2;
  cfg.batch_size = 2;

  SUBCASE("zero learning rate leaves parameters unchanged") {
    cfg.learning_rate = 0.0;
    auto r = train_generator(pairs, {}, cfg);
    auto fresh = init_params(cfg.model, r.model.vocab.size(), cfg.seed);
    auto a = r.model.params.named(), b = fresh.named();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(vals(a[i].second) == vals(b[i].second));
  }
  SUBCASE("same seed gives identical checkpoints") {
    auto bytes = [&] {
      std::ostringstream os;
      tensor::write_checkpoint(os, train_generator(pairs, {}, cfg).model.to_checkpoint());
      return os.str();
    };
    CHECK(bytes() == bytes());
  }
  SUBCASE("loss goes down and the log is complete") {
    cfg.epochs = 6;
    auto r = train_generator(pairs, pairs, cfg);
    REQUIRE(r.log.size() == 6);
    CHECK(r.log.back().train_loss < r.log.front().train_loss);
    CHECK(std::isfinite(r.log.back().val_loss));
    CHECK(r.steps == 18);
  }
  CHECK_THROWS_AS(train_generator(std::vector<TextPair>{}, {}, cfg), ContractError);
}

TEST_CASE("generator checkpoint round trip") {
  textcorpus::Config tc;
  tc.pairs = 4;
  auto pairs = textcorpus::make(tc);
  GenTrainConfig cfg;
  cfg.model.embed_dim = 5;
  cfg.model.hidden = 4;
  cfg.min_freq = 1;
  cfg.epochs = 1;
  auto model = train_generator(pairs, {}, cfg).model;
  std::ostringstream first;
  tensor::write_checkpoint(first, model.to_checkpoint());
  std::istringstream in(first.str());
  auto back = GenModel::from_checkpoint(tensor::read_checkpoint(in));
  std::ostringstream second;
  tensor::write_checkpoint(second, back.to_checkpoint());
  CHECK(first.str() == second.str());
  CHECK(back.version() == model.version());
  auto a = greedy_decode(model.params, model.vocab, pairs[0].source);
  auto b = greedy_decode(back.params, back.vocab, pairs[0].source);
  CHECK(a.ids == b.ids);
}
