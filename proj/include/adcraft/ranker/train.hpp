#pragma once

// Ranker training with pairwise hinge loss, candidate ranking and
// checkpoint packaging.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adcraft/ranker/baselines.hpp"
#include "adcraft/ranker/model.hpp"
#include "adcraft/ranker/triples.hpp"
#include "adcraft/tensor/checkpoint.hpp"

namespace adcraft::ranker {

struct RankTrainConfig {
  RankHyper model;
  RankTask task = RankTask::kKeyphrase;
  double learning_rate = 0.01;  // Adam
  std::size_t epochs = 8;
  std::size_t batch_size = 32;
  std::size_t negatives = 4;
  std::uint64_t seed = 1;
  bool use_cat = false;
  bool use_img = false;
};

struct RankEpochLog {
  std::size_t epoch = 0;
  double mean_hinge = 0.0;
  double active_fraction = 0.0;  // triples with positive loss
};

// A trained ranker with its term table and candidate vocabulary.
struct RankModel {
  TermVocab terms;
  std::vector<std::string> candidates;
  std::vector<std::vector<std::size_t>> candidate_ids;
  RankModelParams params;
  RankTrainConfig config;

  // Every candidate scored against `query` (already carrying metadata terms).
  RankedList rank(std::span<const std::string> query) const;
  double score_candidate(std::span<const std::string> query, const std::string& candidate) const;

  tensor::Checkpoint to_checkpoint() const;
  static RankModel from_checkpoint(const tensor::Checkpoint& ckpt);
  std::string version() const;
};

struct RankTrainResult {
  RankModel model;
  std::vector<RankEpochLog> log;
  std::size_t triples = 0;
};

// Term table: every query term of the examples and every candidate term.
// `warm_start`, when given with a matching dimension, seeds known rows.
RankTrainResult train_ranker(std::span<const RankExample> examples,
                             std::span<const std::string> candidates,
                             const RankTrainConfig& config,
                             const WordVectors* warm_start = nullptr);

}  // namespace adcraft::ranker
