#include "adcraft/corpus/keyphrases.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "adcraft/errors.hpp"

namespace adcraft::corpus {

KeyphraseVocabulary::KeyphraseVocabulary(std::vector<std::vector<std::string>> phrases,
                                         std::vector<double> scores)
    : phrases_(std::move(phrases)), scores_(std::move(scores)) {
  if (scores_.size() != phrases_.size())
    throw ContractError("keyphrase vocabulary: phrase/score count mismatch");
  for (std::size_t i = 0; i < phrases_.size(); ++i) {
    texts_.push_back(join_tokens(phrases_[i]));
    if (!index_.emplace(texts_.back(), i).second)
      throw ContractError("keyphrase vocabulary: duplicate phrase '" + texts_.back() + "'");
    max_len_ = std::max(max_len_, phrases_[i].size());
  }
}

std::size_t KeyphraseVocabulary::find(std::string_view text) const {
  auto it = index_.find(std::string(text));
  return it == index_.end() ? size() : it->second;
}

bool is_stopword(std::string_view token) {
  static const std::set<std::string, std::less<>> kStop = {
      "a",    "an",   "and",  "are",  "as",   "at",   "be",   "by",    "for",  "from",
      "has",  "have", "in",   "is",   "it",   "its",  "of",   "on",    "or",   "our",
      "so",   "that", "the",  "their", "this", "to",  "up",   "was",   "we",   "with",
      "you",  "your", "all",  "more", "now",  "just", "get",  "can",   "will", "not",
      "into", "out",  "over", "than", "too",  "very", "when", "where", "who",  "what"};
  return kStop.contains(token);
}

KeyphraseVocabulary TfidfNgramExtractor::extract(
    std::span<const std::vector<std::string>> corpus, const ExtractOptions& options) const {
  if (corpus.empty()) throw ContractError("extract_keyphrases: empty corpus");
  struct Stat {
    std::size_t freq = 0;
    std::size_t df = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
  };
  std::map<std::vector<std::string>, Stat> stats;
  for (std::size_t doc = 0; doc < corpus.size(); ++doc) {
    const auto& text = corpus[doc];
    for (std::size_t i = 0; i < text.size(); ++i) {
      for (std::size_t len = 1; len <= options.max_len && i + len <= text.size(); ++len) {
        if (is_punct_token(text[i + len - 1])) break;
        if (is_stopword(text[i]) || is_stopword(text[i + len - 1])) continue;
        std::vector<std::string> gram(text.begin() + i, text.begin() + i + len);
        Stat& s = stats[gram];
        ++s.freq;
        if (s.last_doc != doc) {
          ++s.df;
          s.last_doc = doc;
        }
      }
    }
  }
  const double n_docs = static_cast<double>(corpus.size());
  struct Scored {
    std::string text;
    std::vector<std::string> phrase;
    double score;
  };
  std::vector<Scored> scored;
  for (auto& [gram, s] : stats) {
    if (s.freq < options.min_freq) continue;
    if (is_punct_token(gram.front())) continue;
    const double score =
        static_cast<double>(s.freq) * std::log(n_docs / static_cast<double>(s.df));
    scored.push_back({join_tokens(gram), gram, score});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  if (scored.size() > options.top_n) scored.resize(options.top_n);
  std::vector<std::vector<std::string>> phrases;
  std::vector<double> scores;
  for (auto& s : scored) {
    phrases.push_back(std::move(s.phrase));
    scores.push_back(s.score);
  }
  return KeyphraseVocabulary(std::move(phrases), std::move(scores));
}

KeyphraseVocabulary extract_keyphrases(std::span<const std::vector<std::string>> corpus,
                                       const ExtractOptions& options) {
  return TfidfNgramExtractor{}.extract(corpus, options);
}

std::vector<std::string> match_keyphrases(std::span<const std::string> text,
                                          const KeyphraseVocabulary& vocab) {
  std::set<std::string> found;
  for (std::size_t i = 0; i < text.size(); ++i) {
    std::string run;
    for (std::size_t len = 1; len <= vocab.max_len() && i + len <= text.size(); ++len) {
      if (len > 1) run.push_back(' ');
      run += text[i + len - 1];
      if (vocab.find(run) < vocab.size()) found.insert(run);
    }
  }
  return {found.begin(), found.end()};
}

std::vector<std::string> filter_image_tags(std::span<const ImageTag> raw) {
  std::set<std::string> kept;
  for (const auto& t : raw) {
    if (!(t.score >= 0.0 && t.score <= 1.0))
      throw ValidationError("image tag '" + t.tag + "' has confidence " +
                            std::to_string(t.score) + " outside [0,1]");
    if (t.score > kTagConfidenceThreshold) kept.insert(as_token(t.tag));
  }
  return {kept.begin(), kept.end()};
}

}  // namespace adcraft::corpus
