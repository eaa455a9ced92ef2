#include "adcraft/corpus/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <set>

namespace adcraft::corpus {
namespace {

struct Lexicon {
  std::string category;
  std::vector<std::string> products;
  std::vector<std::string> boost_openers, weak_openers, neutral_openers;
  std::vector<std::string> boost_benefits, weak_benefits, neutral_benefits;
  std::vector<std::string> ctas;
  std::vector<std::string> boost_tags, weak_tags, neutral_tags;
};

const std::vector<Lexicon>& lexicons() {
  static const std::vector<Lexicon> kLex = {
      {"retail",
       {"cowboy boots", "running shoes", "winter jackets", "leather bags", "summer dresses"},
       {"limited time offer on", "exclusive deals on"},
       {"great offers on", "check out"},
       {"discover", "shop"},
       {"free shipping", "extra savings", "free returns"},
       {"best quality", "many styles"},
       {"all sizes", "classic looks"},
       {"shop now", "order today"},
       {"woman", "face", "clothing"},
       {"text", "pattern"},
       {"footwear", "bag"}},
      {"telecommunications",
       {"fiber internet", "unlimited data", "home wifi", "tv bundles"},
       {"switch today to", "limited time offer on"},
       {"great prices on", "check out"},
       {"discover", "get"},
       {"bundle deals", "no annual contract", "high speed internet"},
       {"reliable service", "many options"},
       {"local support", "easy setup"},
       {"call now", "learn more"},
       {"man", "woman", "child"},
       {"multimedia", "gadget"},
       {"house", "sofa"}},
      {"auto",
       {"pickup trucks", "hybrid sedans", "electric cars", "family suvs"},
       {"test drive the new", "year end sales on"},
       {"great deals on", "check out"},
       {"explore", "see"},
       {"zero financing", "cash back offers", "low monthly payments"},
       {"many colors", "great value"},
       {"top safety", "smooth rides"},
       {"visit dealer", "book today"},
       {"car", "wheel", "road"},
       {"text", "logo"},
       {"vehicle", "tire"}},
      {"travel",
       {"beach resorts", "city hotels", "cruise trips", "ski lodges"},
       {"last minute deals on", "book early for"},
       {"nice stays at", "check out"},
       {"explore", "visit"},
       {"all inclusive packages", "kids stay free", "free cancellation"},
       {"good views", "many rooms"},
       {"sunny days", "great food"},
       {"book now", "plan trips"},
       {"beach", "sea", "woman"},
       {"building", "text"},
       {"sky", "tree"}},
      {"finance",
       {"credit cards", "home loans", "savings accounts", "auto insurance"},
       {"apply today for", "new low rates on"},
       {"learn about", "check out"},
       {"compare", "see"},
       {"no annual fee", "instant approval", "cash rewards"},
       {"trusted service", "many plans"},
       {"online access", "simple terms"},
       {"apply now", "get quotes"},
       {"man", "smile", "face"},
       {"document", "text"},
       {"desk", "laptop"}},
      {"real estate",
       {"family homes", "downtown condos", "beach houses", "luxury apartments"},
       {"open house for", "new listings of"},
       {"view", "check out"},
       {"find", "browse"},
       {"move in ready", "no closing costs", "virtual tours"},
       {"nice area", "many rooms"},
       {"quiet streets", "big yards"},
       {"schedule tours", "contact agents"},
       {"kitchen", "bedroom", "mansion"},
       {"text", "logo"},
       {"window", "door"}},
      {"job portals",
       {"remote jobs", "nursing jobs", "tech careers", "driver jobs"},
       {"now hiring for", "apply today for"},
       {"search", "check out"},
       {"find", "browse"},
       {"sign on bonus", "flexible hours", "weekly pay"},
       {"many companies", "good jobs"},
       {"local openings", "full time roles"},
       {"apply now", "search jobs"},
       {"man", "woman", "face"},
       {"multimedia", "text"},
       {"office", "laptop"}},
  };
  return kLex;
}

const std::vector<std::string> kSyllables = {"zen", "lu", "mor", "tri", "vex", "ka", "pol",
                                             "dra", "ni", "sol", "qua", "ber", "fin", "rox",
                                             "tal", "mi", "gor", "el", "sy", "van"};

std::vector<std::string> make_brands(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<std::size_t> syl(0, kSyllables.size() - 1);
  std::set<std::string> used;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string b = kSyllables[syl(rng)] + kSyllables[syl(rng)] + kSyllables[syl(rng)];
    if (used.insert(b).second) out.push_back(b);
  }
  return out;
}

enum class Effect { kBoost, kWeak, kNeutral };

struct Choice {
  std::string phrase;
  Effect effect;
};

Choice pick(std::mt19937_64& rng, const std::vector<std::string>& boost,
            const std::vector<std::string>& weak, const std::vector<std::string>& neutral) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  const auto& pool = r < 0.35 ? boost : (r < 0.7 ? weak : neutral);
  const Effect e = r < 0.35 ? Effect::kBoost : (r < 0.7 ? Effect::kWeak : Effect::kNeutral);
  std::uniform_int_distribution<std::size_t> idx(0, pool.size() - 1);
  return {pool[idx(rng)], e};
}

double multiplier(Effect e, double boost, double weak) {
  return e == Effect::kBoost ? boost : (e == Effect::kWeak ? weak : 1.0);
}

struct TextVariant {
  std::vector<std::string> tokens;
  double factor = 1.0;
};

struct ImageVariant {
  std::string image_id;
  std::vector<ImageTag> tags;
  double factor = 1.0;
};

TextVariant make_text(std::mt19937_64& rng, const Lexicon& lex, const std::string& brand,
                      const std::string& product, const std::string& cta) {
  const Choice opener = pick(rng, lex.boost_openers, lex.weak_openers, lex.neutral_openers);
  const Choice benefit = pick(rng, lex.boost_benefits, lex.weak_benefits, lex.neutral_benefits);
  TextVariant v;
  v.tokens = tokenize(opener.phrase + " " + brand + " " + product + " with " + benefit.phrase +
                      " . " + cta + " !");
  v.factor = multiplier(opener.effect, 1.25, 0.85) * multiplier(benefit.effect, 1.3, 0.85);
  return v;
}

ImageVariant make_image(std::mt19937_64& rng, const Lexicon& lex, const std::string& image_id) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> keep(0.81, 0.99);
  std::uniform_real_distribution<double> drop(0.3, 0.79);
  ImageVariant v;
  v.image_id = image_id;
  std::set<std::string> chosen;
  auto add = [&](const std::vector<std::string>& pool, double p, double f) {
    for (const auto& t : pool)
      if (u(rng) < p && chosen.insert(t).second) {
        v.tags.push_back({t, keep(rng)});
        v.factor *= f;
      }
  };
  add(lex.boost_tags, 0.4, 1.2);
  add(lex.weak_tags, 0.4, 0.85);
  add(lex.neutral_tags, 0.6, 1.0);
  if (chosen.empty()) {
    v.tags.push_back({lex.neutral_tags.front(), keep(rng)});
  }
  // low-confidence detections that the 0.8 filter must drop
  if (u(rng) < 0.5) v.tags.push_back({"person", drop(rng)});
  return v;
}

}  // namespace

std::vector<std::string> synthetic_categories() {
  std::vector<std::string> out;
  for (const auto& l : lexicons()) out.push_back(l.category);
  return out;
}

std::vector<AdRecord> synthesize_ads(const SynthConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  const auto& lex = lexicons();
  const auto brands = make_brands(cfg.advertisers, cfg.seed);
  std::uniform_int_distribution<std::uint64_t> impressions(cfg.min_impressions,
                                                           cfg.max_impressions);
  std::uniform_int_distribution<std::size_t> n_ads(cfg.min_ads_per_group, cfg.max_ads_per_group);
  std::uniform_real_distribution<double> base_ctr(0.004, 0.02);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, cfg.ctr_noise);

  std::vector<AdRecord> out;
  std::size_t ad_counter = 0;
  for (std::size_t a = 0; a < cfg.advertisers; ++a) {
    const Lexicon& L = lex[a % lex.size()];
    const std::string adv = "adv" + std::to_string(a);
    const std::string& brand = brands[a];
    for (std::size_t c = 0; c < cfg.campaigns_per_advertiser; ++c) {
      const std::string campaign = adv + "-c" + std::to_string(c);
      const std::string& product = L.products[(a + c) % L.products.size()];
      for (std::size_t g = 0; g < cfg.ad_groups_per_campaign; ++g) {
        const std::string group = campaign + "-g" + std::to_string(g);
        const std::string& cta = L.ctas[(a + g) % L.ctas.size()];
        const double group_ctr = base_ctr(rng);
        std::vector<TextVariant> texts{make_text(rng, L, brand, product, cta)};
        std::vector<ImageVariant> images{make_image(rng, L, group + "-i0")};
        const std::size_t count = n_ads(rng);
        std::vector<std::pair<std::size_t, std::size_t>> combos{{0, 0}};
        while (combos.size() < count) {
          const double r = u(rng);
          std::size_t ti = 0, ii = 0;
          if (r < 0.5) {
            texts.push_back(make_text(rng, L, brand, product, cta));
            ti = texts.size() - 1;
            ii = std::uniform_int_distribution<std::size_t>(0, images.size() - 1)(rng);
          } else if (r < 0.85) {
            images.push_back(make_image(rng, L, group + "-i" + std::to_string(images.size())));
            ii = images.size() - 1;
            ti = std::uniform_int_distribution<std::size_t>(0, texts.size() - 1)(rng);
          } else {
            texts.push_back(make_text(rng, L, brand, product, cta));
            images.push_back(make_image(rng, L, group + "-i" + std::to_string(images.size())));
            ti = texts.size() - 1;
            ii = images.size() - 1;
          }
          if (std::find(combos.begin(), combos.end(), std::make_pair(ti, ii)) == combos.end())
            combos.emplace_back(ti, ii);
        }
        for (const auto& [ti, ii] : combos) {
          AdRecord r;
          r.advertiser_id = adv;
          r.category = L.category;
          r.campaign_id = campaign;
          r.ad_group_id = group;
          r.ad_id = "ad" + std::to_string(ad_counter++);
          r.text = texts[ti].tokens;
          r.image_id = images[ii].image_id;
          r.image_tags = images[ii].tags;
          r.impressions = impressions(rng);
          const double ctr = std::clamp(
              group_ctr * texts[ti].factor * images[ii].factor * std::exp(noise(rng)), 0.0, 1.0);
          r.clicks = static_cast<std::uint64_t>(
              std::llround(ctr * static_cast<double>(r.impressions)));
          out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

std::vector<std::string> synthetic_lexicon(const SynthConfig& cfg) {
  std::set<std::string> words;
  auto add_phrases = [&](const std::vector<std::string>& phrases) {
    for (const auto& p : phrases)
      for (auto& t : tokenize(p)) words.insert(t);
  };
  for (const auto& L : lexicons()) {
    words.insert(as_token(L.category));
    for (const auto* pool :
         {&L.products, &L.boost_openers, &L.weak_openers, &L.neutral_openers, &L.boost_benefits,
          &L.weak_benefits, &L.neutral_benefits, &L.ctas})
      add_phrases(*pool);
    for (const auto* pool : {&L.boost_tags, &L.weak_tags, &L.neutral_tags})
      for (const auto& t : *pool) words.insert(as_token(t));
  }
  words.insert("person");
  for (const char* w : {"with", ".", "!"}) words.insert(w);
  for (auto& b : make_brands(cfg.advertisers, cfg.seed)) words.insert(b);
  return {words.begin(), words.end()};
}

void write_synthetic_embeddings(std::ostream& out, const SynthConfig& cfg, std::size_t dim) {
  std::mt19937_64 rng(cfg.seed ^ 0x51ed270b27c5e3a1ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto& lex = lexicons();
  std::vector<std::vector<double>> centers(lex.size(), std::vector<double>(dim));
  for (auto& c : centers)
    for (double& x : c) x = gauss(rng);
  // word -> owning category (first one that uses it)
  std::map<std::string, std::size_t> owner;
  for (std::size_t ci = 0; ci < lex.size(); ++ci) {
    const Lexicon& L = lex[ci];
    owner.emplace(as_token(L.category), ci);
    for (const auto* pool : {&L.products, &L.boost_benefits, &L.weak_benefits,
                             &L.neutral_benefits, &L.boost_tags, &L.neutral_tags})
      for (const auto& p : *pool)
        for (auto& t : tokenize(p)) owner.emplace(t, ci);
  }
  for (const auto& w : synthetic_lexicon(cfg)) {
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    if (auto it = owner.find(w); it != owner.end())
      for (std::size_t i = 0; i < dim; ++i) v[i] = 0.6 * v[i] + centers[it->second][i];
    out << w;
    for (double x : v) out << ' ' << std::setprecision(6) << x;
    out << '\n';
  }
}

}  // namespace adcraft::corpus
