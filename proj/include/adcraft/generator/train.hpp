#pragma once

// Generator training loop and checkpoint packaging.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adcraft/corpus/pairs.hpp"
#include "adcraft/corpus/splits.hpp"
#include "adcraft/generator/model.hpp"
#include "adcraft/generator/vocab.hpp"
#include "adcraft/tensor/checkpoint.hpp"
#include "adcraft/tensor/optim.hpp"

namespace adcraft::generator {

struct GenTrainConfig {
  GenHyper model;
  tensor::OptimizerKind optimizer = tensor::OptimizerKind::kSgd;
  double learning_rate = 0.5;
  double lr_decay = 0.5;       // applied when the monitored loss stops improving
  std::size_t patience = 2;    // epochs without improvement before decaying
  double clip_norm = 2.0;
  std::size_t batch_size = 16;
  std::size_t epochs = 20;
  std::size_t max_steps = 0;   // 0: no cap
  std::size_t min_freq = 2;
  std::uint64_t seed = 1;
  bool use_cat = false;
  bool use_img = false;
};

struct TextPair {
  std::vector<std::string> source;  // already augmented
  std::vector<std::string> target;
};

std::vector<TextPair> text_pairs(std::span<const corpus::CreativePair> pairs, bool use_cat,
                                 bool use_img);

struct GenEpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // mean over the epoch's batches
  double val_loss = 0.0;    // NaN without a validation set
  double learning_rate = 0.0;
};

struct GenModel {
  GenVocab vocab;
  GenModelParams params;
  GenTrainConfig config;

  tensor::Checkpoint to_checkpoint() const;
  static GenModel from_checkpoint(const tensor::Checkpoint& ckpt);
  // "gen-" + hex of the checkpoint's parameter hash, stable across saves.
  std::string version() const;
};

struct GenTrainResult {
  GenModel model;
  std::vector<GenEpochLog> log;
  std::size_t steps = 0;
};

// Vocabulary from the training sources and targets only.
GenTrainResult train_generator(std::span<const TextPair> train, std::span<const TextPair> val,
                               const GenTrainConfig& config);
GenTrainResult train_generator(const corpus::DatasetSplit& split, const GenTrainConfig& config);

// Mean teacher-forced loss over `pairs`, no gradients.
double evaluate_loss(const GenModel& model, std::span<const TextPair> pairs);

}  // namespace adcraft::generator
