#include "doctest.h"

#include <algorithm>
#include <random>

#include "adcraft/corpus/io.hpp"
#include "adcraft/corpus/keyphrases.hpp"
#include "adcraft/corpus/pairs.hpp"
#include "adcraft/errors.hpp"
#include "pair_oracle.hpp"

using namespace adcraft;
using namespace adcraft::corpus;

namespace {

AdRecord ad(std::string id, std::string text, std::string image, std::uint64_t clicks,
            std::uint64_t imp = 100000, std::string group = "g1") {
  AdRecord r;
  r.advertiser_id = "adv";
  r.category = "telecommunications";
  r.campaign_id = "c1";
  r.ad_group_id = std::move(group);
  r.ad_id = std::move(id);
  r.text = tokenize(text);
  r.image_id = std::move(image);
  r.impressions = imp;
  r.clicks = clicks;
  return r;
}

}  // namespace

TEST_CASE("three-ad group yields one pair of each kind") {
  // ctr A .010, B .013, C .012
  std::vector<AdRecord> g = {ad("A", "t one", "I1", 1000), ad("B", "t one", "I2", 1300),
                             ad("C", "t two", "I1", 1200)};
  auto dist = build_pairs(g, PairKind::kDist, {});
  REQUIRE(dist.size() == 1);
  CHECK(dist[0].source.ad_id == "A");
  CHECK(dist[0].target.ad_id == "B");
  CHECK(dist[0].rel_lift == doctest::Approx(0.3));
  auto dtsi = build_pairs(g, PairKind::kDtsi, {});
  REQUIRE(dtsi.size() == 1);
  CHECK(dtsi[0].source.ad_id == "A");
  CHECK(dtsi[0].target.ad_id == "C");
  CHECK(dtsi[0].rel_lift == doctest::Approx(0.2));
}

TEST_CASE("single-ad group yields nothing") {
  std::vector<AdRecord> g = {ad("A", "t one", "I1", 1000)};
  CHECK(build_pairs(g, PairKind::kDtsi, {}).empty());
  CHECK(build_pairs(g, PairKind::kDist, {}).empty());
}

TEST_CASE("impression floor and lift threshold are strict") {
  // lift exactly 10% does not pass
  std::vector<AdRecord> g = {ad("A", "x", "I1", 1000), ad("B", "y", "I1", 1100)};
  CHECK(build_pairs(g, PairKind::kDtsi, {}).empty());
  g[1].clicks = 1101;
  CHECK(build_pairs(g, PairKind::kDtsi, {}).size() == 1);
  g[0].impressions = 10000;
  g[0].clicks = 100;
  CHECK(build_pairs(g, PairKind::kDtsi, {}).empty());
  g[0].impressions = 10001;
  CHECK(build_pairs(g, PairKind::kDtsi, {}).size() == 1);
}

TEST_CASE("zero-ctr sources never pair") {
  std::vector<AdRecord> g = {ad("A", "x", "I1", 0), ad("B", "y", "I1", 10)};
  CHECK(build_pairs(g, PairKind::kDtsi, {}).empty());
}

TEST_CASE("dedup keeps the largest lift per source text") {
  std::vector<AdRecord> g = {ad("A", "x", "I1", 1000), ad("B", "y", "I1", 1500),
                             ad("C", "z", "I1", 2000)};
  auto pairs = build_pairs(g, PairKind::kDtsi, {});
  // sources: A (best target C), B (target C)
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].source.ad_id == "A");
  CHECK(pairs[0].target.ad_id == "C");
  CHECK(pairs[1].source.ad_id == "B");
  CHECK(pairs[1].target.ad_id == "C");
}

TEST_CASE("equal-lift ties go to the smaller target id") {
  std::vector<AdRecord> g = {ad("A", "x", "I1", 1000), ad("D", "y", "I1", 2000),
                             ad("C", "z", "I1", 2000)};
  auto pairs = build_pairs(g, PairKind::kDtsi, {});
  REQUIRE(!pairs.empty());
  CHECK(pairs[0].target.ad_id == "C");
}

TEST_CASE("pairs never cross ad-groups") {
  std::vector<AdRecord> g = {ad("A", "x", "I1", 1000, 100000, "g1"),
                             ad("B", "y", "I1", 2000, 100000, "g2")};
  CHECK(build_pairs(g, PairKind::kDtsi, {}).empty());
}

TEST_CASE("build_pairs matches the brute-force enumerator on random ad-groups") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto ads = oracle::random_ad_groups(100, 8, seed);
    for (PairKind kind : {PairKind::kDtsi, PairKind::kDist}) {
      for (double delta : {0.0, 10.0, 50.0}) {
        auto got = build_pairs(ads, kind, {delta, 10000});
        auto want = oracle::brute_force_pairs(ads, kind, delta, 10000);
        CHECK(oracle::keys_of(got) == want);
        for (const auto& p : got) CHECK_NOTHROW(validate_pair(p, delta));
      }
    }
  }
}

TEST_CASE("build_pairs ignores input order") {
  auto ads = oracle::random_ad_groups(40, 8, 99);
  auto base = build_pairs(ads, PairKind::kDtsi, {});
  std::mt19937_64 rng(3);
  std::shuffle(ads.begin(), ads.end(), rng);
  CHECK(build_pairs(ads, PairKind::kDtsi, {}) == base);
}

TEST_CASE("pairs carry keyphrase and tag annotations") {
  auto a = ad("A", "enjoy free shipping today", "I1", 1000);
  auto b = ad("B", "free shipping and clearance", "I1", 1500);
  a.image_tags = {{"woman", 0.95}, {"face", 0.9}, {"multimedia", 0.79}};
  b.image_tags = a.image_tags;
  KeyphraseVocabulary vocab({{"free", "shipping"}, {"clearance"}}, {2.0, 1.0});
  std::vector<AdRecord> g = {a, b};
  auto pairs = build_pairs(g, PairKind::kDtsi, {}, &vocab);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].source_keyphrases == std::vector<std::string>{"free shipping"});
  CHECK(pairs[0].target_keyphrases == std::vector<std::string>{"clearance", "free shipping"});
  CHECK(pairs[0].source_tags == std::vector<std::string>{"face", "woman"});
}

TEST_CASE("augment_input prefixes category and sorted tags") {
  CreativePair p;
  p.source.category = "retail";
  p.source.text = {"great", "offers"};
  p.source_tags = {"woman", "face"};
  CHECK(augment_input(p, true, true) ==
        std::vector<std::string>{"retail", "face", "woman", "<sep>", "great", "offers"});
  CHECK(augment_input(p, false, false) == p.source.text);
  CHECK(augment_input(p, true, false) ==
        std::vector<std::string>{"retail", "<sep>", "great", "offers"});
}

TEST_CASE("validate_pair catches broken invariants") {
  std::vector<AdRecord> g = {ad("A", "x", "I1", 1000), ad("B", "y", "I1", 2000)};
  auto p = build_pairs(g, PairKind::kDtsi, {}).at(0);
  CHECK_NOTHROW(validate_pair(p, 10));
  auto bad = p;
  bad.target.image_id = "I9";
  CHECK_THROWS_AS(validate_pair(bad, 10), ValidationError);
  bad = p;
  std::swap(bad.source, bad.target);
  CHECK_THROWS_AS(validate_pair(bad, 10), ValidationError);
}

TEST_CASE("pairs survive a write/read round trip") {
  auto ads = oracle::random_ad_groups(30, 8, 5);
  auto pairs = build_pairs(ads, PairKind::kDist, {});
  REQUIRE(!pairs.empty());
  std::ostringstream out;
  write_pairs(out, pairs);
  std::istringstream in(out.str());
  CHECK(read_pairs(in) == pairs);
}
