#pragma once

// Generation metrics: corpus BLEU-4, ROUGE-1/2/L and keyphrase P/R/F.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "adcraft/corpus/keyphrases.hpp"
#include "adcraft/corpus/pairs.hpp"

namespace adcraft::metrics {

using Tokens = std::vector<std::string>;

// Corpus BLEU-4 on a 0..100 scale: geometric mean of clipped n-gram
// precisions (n = 1..4) times the brevity penalty. An order whose matches are
// all zero uses 0.1 / candidates; an order with no candidate n-grams at all
// is left out of the mean. Throws ContractError on an empty or ragged corpus.
double bleu(std::span<const Tokens> references, std::span<const Tokens> hypotheses);

struct Prf {
  double p = 0.0, r = 0.0, f = 0.0;
};

// 2PR / (P + R), 0 when both are 0.
double f_score(double p, double r);

enum class RougeVariant { k1, k2, kL };

// Per-example P/R/F averaged over the corpus. ROUGE-n counts clipped n-gram
// overlap, ROUGE-L uses the longest common subsequence. An example where
// neither side has any n-grams scores 1.
Prf rouge(std::span<const Tokens> references, std::span<const Tokens> hypotheses,
          RougeVariant variant);
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

// Keyphrase precision/recall of one generated text against the gold phrases
// (the phrases matched in the target). Both sets empty: P = R = 1. An empty
// gold set gives recall 1, an empty prediction precision 0 otherwise.
Prf kp_metrics(std::span<const std::string> generated, std::span<const std::string> gold,
               const corpus::KeyphraseVocabulary& vocab);

// As kp_metrics with the top `r` ranked phrases added to the predicted set.
Prf assisted_kp(std::span<const std::string> generated, std::span<const std::string> ranked,
                std::size_t r, std::span<const std::string> gold,
                const corpus::KeyphraseVocabulary& vocab);

struct GenEvalReport {
  double bleu = 0.0;  // 0..100
  double rouge1_f = 0.0, rouge2_f = 0.0, rougeL_f = 0.0;
  double kp_p = 0.0, kp_r = 0.0, kp_f = 0.0;  // macro P and R, F their harmonic mean
  std::size_t examples = 0;
};

struct GenExampleEval {
  Tokens reference;
  Tokens hypothesis;
  std::vector<std::string> gold_keyphrases;
};

GenEvalReport evaluate_generation(std::span<const GenExampleEval> examples,
                                  const corpus::KeyphraseVocabulary& vocab);

// Source text taken as the prediction for every pair.
GenEvalReport baseline_pred_src(std::span<const corpus::CreativePair> pairs,
                                const corpus::KeyphraseVocabulary& vocab);

}  // namespace adcraft::metrics
