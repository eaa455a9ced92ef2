#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adcraft/corpus/ad_record.hpp"

namespace adcraft::corpus {

// Ordered phrase list with corpus scores, highest score first.
class KeyphraseVocabulary {
 public:
  KeyphraseVocabulary() = default;
  KeyphraseVocabulary(std::vector<std::vector<std::string>> phrases, std::vector<double> scores);

  std::size_t size() const { return phrases_.size(); }
  bool empty() const { return phrases_.empty(); }
  const std::vector<std::string>& phrase(std::size_t i) const { return phrases_.at(i); }
  const std::string& text(std::size_t i) const { return texts_.at(i); }
  double score(std::size_t i) const { return scores_.at(i); }
  const std::vector<std::string>& texts() const { return texts_; }
  std::size_t max_len() const { return max_len_; }
  // Index of a phrase given as space-joined text, or size() if absent.
  std::size_t find(std::string_view text) const;

 private:
  std::vector<std::vector<std::string>> phrases_;
  std::vector<std::string> texts_;
  std::vector<double> scores_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t max_len_ = 0;
};

struct ExtractOptions {
  std::size_t max_len = 3;
  std::size_t min_freq = 2;
  std::size_t top_n = 200;
};

bool is_stopword(std::string_view token);

// Pluggable unsupervised extractor over a corpus of tokenized ad texts.
class KeyphraseExtractor {
 public:
  virtual ~KeyphraseExtractor() = default;
  virtual KeyphraseVocabulary extract(std::span<const std::vector<std::string>> corpus,
                                      const ExtractOptions& options) const = 0;
};

// Contiguous n-grams (1..max_len) that neither start nor end with a stopword
// and hold no punctuation token, scored by total frequency x ln(N / df) with
// each text as one document. Ties go to the lexicographically smaller phrase.
class TfidfNgramExtractor final : public KeyphraseExtractor {
 public:
  KeyphraseVocabulary extract(std::span<const std::vector<std::string>> corpus,
                              const ExtractOptions& options) const override;
};

KeyphraseVocabulary extract_keyphrases(std::span<const std::vector<std::string>> corpus,
                                       const ExtractOptions& options = {});

// Vocabulary phrases occurring as contiguous token runs, each reported once,
// sorted lexicographically.
std::vector<std::string> match_keyphrases(std::span<const std::string> text,
                                          const KeyphraseVocabulary& vocab);

inline constexpr double kTagConfidenceThreshold = 0.8;

// Tags with confidence strictly above 0.8 as single tokens, deduplicated and
// sorted. Throws ValidationError for a confidence outside [0,1].
std::vector<std::string> filter_image_tags(std::span<const ImageTag> raw);

}  // namespace adcraft::corpus
