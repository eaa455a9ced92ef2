#include "adcraft/metrics/text_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "adcraft/errors.hpp"

namespace adcraft::metrics {

namespace {

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(std::span<const std::string> t, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) ++out[{t.begin() + i, t.begin() + i + n}];
  return out;
}

std::size_t clipped_matches(const NgramCounts& hyp, const NgramCounts& ref) {
  std::size_t m = 0;
  for (const auto& [g, c] : hyp)
    if (auto it = ref.find(g); it != ref.end()) m += std::min(c, it->second);
  return m;
}

std::size_t total(const NgramCounts& c) {
  std::size_t t = 0;
  for (const auto& [g, n] : c) t += n;
  return t;
}

void check_corpus(std::span<const Tokens> refs, std::span<const Tokens> hyps, const char* what) {
  if (refs.empty()) throw ContractError(std::string(what) + ": empty corpus");
  if (refs.size() != hyps.size())
    throw ContractError(std::string(what) + ": " + std::to_string(refs.size()) +
                        " references vs " + std::to_string(hyps.size()) + " hypotheses");
}

}  // namespace

double bleu(std::span<const Tokens> references, std::span<const Tokens> hypotheses) {
  check_corpus(references, hypotheses, "bleu");
  std::size_t matches[5] = {}, counts[5] = {}, hyp_len = 0, ref_len = 0;
  for (std::size_t i = 0; i < references.size(); ++i) {
    hyp_len += hypotheses[i].size();
    ref_len += references[i].size();
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto h = ngrams(hypotheses[i], n);
      matches[n] += clipped_matches(h, ngrams(references[i], n));
      counts[n] += total(h);
    }
  }
  if (hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  std::size_t orders = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    if (counts[n] == 0) continue;
    const double m = matches[n] ? static_cast<double>(matches[n]) : 0.1;
    log_sum += std::log(m / static_cast<double>(counts[n]));
    ++orders;
  }
  const double bp = hyp_len > ref_len ? 1.0
                                      : std::exp(1.0 - static_cast<double>(ref_len) /
                                                           static_cast<double>(hyp_len));
  return 100.0 * bp * std::exp(log_sum / static_cast<double>(orders));
}

double f_score(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Prf rouge(std::span<const Tokens> references, std::span<const Tokens> hypotheses,
          RougeVariant variant) {
  check_corpus(references, hypotheses, "rouge");
  Prf acc;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto& ref = references[i];
    const auto& hyp = hypotheses[i];
    double m, h, r;
    if (variant == RougeVariant::kL) {
      m = static_cast<double>(lcs_length(ref, hyp));
      h = static_cast<double>(hyp.size());
      r = static_cast<double>(ref.size());
    } else {
      const std::size_t n = variant == RougeVariant::k1 ? 1 : 2;
      const auto hg = ngrams(hyp, n), rg = ngrams(ref, n);
      m = static_cast<double>(clipped_matches(hg, rg));
      h = static_cast<double>(total(hg));
      r = static_cast<double>(total(rg));
    }
    Prf e;
    if (h == 0.0 && r == 0.0) {
      e = {1.0, 1.0, 1.0};
    } else {
      e.p = h > 0.0 ? m / h : 0.0;
      e.r = r > 0.0 ? m / r : 0.0;
      e.f = f_score(e.p, e.r);
    }
    acc.p += e.p;
    acc.r += e.r;
    acc.f += e.f;
  }
  const double n = static_cast<double>(references.size());
  return {acc.p / n, acc.r / n, acc.f / n};
}

namespace {

Prf set_prf(const std::set<std::string>& pred, const std::set<std::string>& gold) {
  if (pred.empty() && gold.empty()) return {1.0, 1.0, 1.0};
  std::size_t hit = 0;
  for (const auto& p : pred) hit += gold.contains(p);
  Prf out;
  out.p = pred.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(pred.size());
  out.r = gold.empty() ? 1.0 : static_cast<double>(hit) / static_cast<double>(gold.size());
  out.f = f_score(out.p, out.r);
  return out;
}

}  // namespace

Prf kp_metrics(std::span<const std::string> generated, std::span<const std::string> gold,
               const corpus::KeyphraseVocabulary& vocab) {
  return assisted_kp(generated, {}, 0, gold, vocab);
}

Prf assisted_kp(std::span<const std::string> generated, std::span<const std::string> ranked,
                std::size_t r, std::span<const std::string> gold,
                const corpus::KeyphraseVocabulary& vocab) {
  const auto matched = corpus::match_keyphrases(generated, vocab);
  std::set<std::string> pred(matched.begin(), matched.end());
  for (std::size_t i = 0; i < r && i < ranked.size(); ++i) pred.insert(ranked[i]);
  return set_prf(pred, {gold.begin(), gold.end()});
}

GenEvalReport evaluate_generation(std::span<const GenExampleEval> examples,
                                  const corpus::KeyphraseVocabulary& vocab) {
  if (examples.empty()) throw ContractError("evaluate_generation: empty corpus");
  std::vector<Tokens> refs, hyps;
  double kp_p = 0.0, kp_r = 0.0;
  for (const auto& e : examples) {
    refs.push_back(e.reference);
    hyps.push_back(e.hypothesis);
    const Prf kp = kp_metrics(e.hypothesis, e.gold_keyphrases, vocab);
    kp_p += kp.p;
    kp_r += kp.r;
  }
  GenEvalReport rep;
  rep.examples = examples.size();
  rep.bleu = bleu(refs, hyps);
  rep.rouge1_f = rouge(refs, hyps, RougeVariant::k1).f;
  rep.rouge2_f = rouge(refs, hyps, RougeVariant::k2).f;
  rep.rougeL_f = rouge(refs, hyps, RougeVariant::kL).f;
  rep.kp_p = kp_p / static_cast<double>(examples.size());
  rep.kp_r = kp_r / static_cast<double>(examples.size());
  rep.kp_f = f_score(rep.kp_p, rep.kp_r);
  return rep;
}

GenEvalReport baseline_pred_src(std::span<const corpus::CreativePair> pairs,
                                const corpus::KeyphraseVocabulary& vocab) {
  std::vector<GenExampleEval> ex;
  for (const auto& p : pairs) {
    ex.push_back({p.target.text, p.source.text, corpus::match_keyphrases(p.target.text, vocab)});
  }
  return evaluate_generation(ex, vocab);
}

}  // namespace adcraft::metrics
