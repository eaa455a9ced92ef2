#pragma once

// Unsupervised ranking baselines: averaged word-vector cosine and TF-IDF
// cosine between the source text and each candidate.

#include <cstddef>
#include <filesystem>
#include <map>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "adcraft/ranker/model.hpp"

namespace adcraft::ranker {

// Word vectors from "word v1 ... vd" lines.
class WordVectors {
 public:
  static WordVectors read(std::istream& in);
  static WordVectors load(const std::filesystem::path& path);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  const std::vector<double>* find(const std::string& word) const;
  void add(const std::string& word, std::vector<double> v);
  // Mean of the known words' vectors; all zeros if none are known.
  std::vector<double> average(std::span<const std::string> words) const;

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

double cosine(std::span<const double> a, std::span<const double> b);

// Candidates are space-joined phrases or single tags.
RankedList baseline_emb_sim(const WordVectors& vectors, std::span<const std::string> query,
                            std::span<const std::string> candidates);

// Inverse document frequencies over a corpus of tokenized texts, smoothed as
// idf(t) = ln((N + 1) / (df(t) + 1)) + 1.
class TfidfIndex {
 public:
  TfidfIndex() = default;
  explicit TfidfIndex(std::span<const std::vector<std::string>> docs);

  double idf(const std::string& term) const;
  std::size_t documents() const { return n_docs_; }
  // Raw term count times idf.
  std::map<std::string, double> weights(std::span<const std::string> tokens) const;

 private:
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

double sparse_cosine(const std::map<std::string, double>& a,
                     const std::map<std::string, double>& b);

RankedList baseline_tfidf(const TfidfIndex& index, std::span<const std::string> query,
                          std::span<const std::string> candidates);

// Splits a space-joined candidate into its terms.
std::vector<std::string> candidate_terms(const std::string& candidate);

}  // namespace adcraft::ranker
