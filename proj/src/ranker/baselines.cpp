#include "adcraft/ranker/baselines.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "adcraft/errors.hpp"

namespace adcraft::ranker {

WordVectors WordVectors::read(std::istream& in) {
  WordVectors wv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) continue;
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    if (!ls.eof()) throw ParseError("embedding file: bad number", line_no);
    if (wv.dim_ == 0) wv.dim_ = v.size();
    if (v.empty() || v.size() != wv.dim_)
      throw ParseError("embedding file: expected " + std::to_string(wv.dim_) + " values for '" +
                           word + "', got " + std::to_string(v.size()),
                       line_no);
    wv.vectors_[word] = std::move(v);
  }
  return wv;
}

WordVectors WordVectors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file " + path.string());
  return read(in);
}

const std::vector<double>* WordVectors::find(const std::string& word) const {
  auto it = vectors_.find(word);
  return it == vectors_.end() ? nullptr : &it->second;
}

void WordVectors::add(const std::string& word, std::vector<double> v) {
  if (dim_ == 0) dim_ = v.size();
  if (v.size() != dim_) throw DimensionError("word vector of the wrong dimension");
  vectors_[word] = std::move(v);
}

std::vector<double> WordVectors::average(std::span<const std::string> words) const {
  std::vector<double> mean(dim_, 0.0);
  std::size_t known = 0;
  for (const auto& w : words)
    if (const auto* v = find(w)) {
      for (std::size_t i = 0; i < dim_; ++i) mean[i] += (*v)[i];
      ++known;
    }
  if (known)
    for (double& x : mean) x /= static_cast<double>(known);
  return mean;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

std::vector<std::string> candidate_terms(const std::string& candidate) {
  std::istringstream is(candidate);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

RankedList baseline_emb_sim(const WordVectors& vectors, std::span<const std::string> query,
                            std::span<const std::string> candidates) {
  const auto q = vectors.average(query);
  RankedList out;
  for (const auto& c : candidates) {
    const auto terms = candidate_terms(c);
    out.push_back({c, cosine(q, vectors.average(terms))});
  }
  sort_ranked(out);
  return out;
}

TfidfIndex::TfidfIndex(std::span<const std::vector<std::string>> docs) : n_docs_(docs.size()) {
  for (const auto& d : docs) {
    std::set<std::string> seen(d.begin(), d.end());
    for (const auto& t : seen) ++df_[t];
  }
}

double TfidfIndex::idf(const std::string& term) const {
  auto it = df_.find(term);
  const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((static_cast<double>(n_docs_) + 1.0) / (df + 1.0)) + 1.0;
}

std::map<std::string, double> TfidfIndex::weights(
    std::span<const std::string> tokens) const {
  std::map<std::string, double> tf;
  for (const auto& t : tokens) tf[t] += 1.0;
  for (auto& [t, w] : tf) w *= idf(t);
  return tf;
}

double sparse_cosine(const std::map<std::string, double>& a,
                     const std::map<std::string, double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (const auto& [t, w] : a) {
    aa += w * w;
    if (auto it = b.find(t); it != b.end()) ab += w * it->second;
  }
  for (const auto& [t, w] : b) bb += w * w;
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

RankedList baseline_tfidf(const TfidfIndex& index, std::span<const std::string> query,
                          std::span<const std::string> candidates) {
  const auto q = index.weights(query);
  RankedList out;
  for (const auto& c : candidates) out.push_back({c, sparse_cosine(q, index.weights(candidate_terms(c)))});
  sort_ranked(out);
  return out;
}

}  // namespace adcraft::ranker
