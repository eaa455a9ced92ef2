#include "adcraft/generator/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "adcraft/errors.hpp"
#include "adcraft/tensor/ops.hpp"

namespace adcraft::generator {

std::vector<TextPair> text_pairs(std::span<const corpus::CreativePair> pairs, bool use_cat,
                                 bool use_img) {
  std::vector<TextPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back({corpus::augment_input(p, use_cat, use_img), p.target.text});
  return out;
}

namespace {

nlohmann::json hyper_json(const GenTrainConfig& c) {
  return {{"embed_dim", c.model.embed_dim},
          {"hidden", c.model.hidden},
          {"copy", c.model.copy},
          {"optimizer", std::string(tensor::optimizer_name(c.optimizer))},
          {"learning_rate", c.learning_rate},
          {"lr_decay", c.lr_decay},
          {"patience", c.patience},
          {"clip_norm", c.clip_norm},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"max_steps", c.max_steps},
          {"min_freq", c.min_freq},
          {"seed", c.seed},
          {"use_cat", c.use_cat},
          {"use_img", c.use_img}};
}

GenTrainConfig config_from_json(const nlohmann::json& j) {
  GenTrainConfig c;
  c.model.embed_dim = j.at("embed_dim");
  c.model.hidden = j.at("hidden");
  c.model.copy = j.at("copy");
  c.optimizer = tensor::parse_optimizer(j.at("optimizer").get<std::string>());
  c.learning_rate = j.at("learning_rate");
  c.lr_decay = j.at("lr_decay");
  c.patience = j.at("patience");
  c.clip_norm = j.at("clip_norm");
  c.batch_size = j.at("batch_size");
  c.epochs = j.at("epochs");
  c.max_steps = j.at("max_steps");
  c.min_freq = j.at("min_freq");
  c.seed = j.at("seed");
  c.use_cat = j.at("use_cat");
  c.use_img = j.at("use_img");
  return c;
}

}  // namespace

tensor::Checkpoint GenModel::to_checkpoint() const {
  tensor::Checkpoint ckpt;
  ckpt.model_kind = "generator";
  ckpt.hyper = hyper_json(config);
  std::vector<std::string> words(vocab.tokens().begin() + kNumSpecials, vocab.tokens().end());
  ckpt.vocab_hashes = {{"generator", tensor::hex64(vocab.hash())}};
  ckpt.extras = {{"vocab", words}};
  for (const auto& [name, t] : params.named()) ckpt.add(name, t);
  return ckpt;
}

GenModel GenModel::from_checkpoint(const tensor::Checkpoint& ckpt) {
  if (ckpt.model_kind != "generator")
    throw ContractError("checkpoint holds a '" + ckpt.model_kind + "' model, not a generator");
  GenModel m;
  m.config = config_from_json(ckpt.hyper);
  m.vocab = GenVocab(ckpt.extras.at("vocab").get<std::vector<std::string>>());
  const std::string want = ckpt.vocab_hashes.at("generator");
  if (tensor::hex64(m.vocab.hash()) != want)
    throw ContractError("generator checkpoint: vocabulary hash mismatch");
  m.params = init_params(m.config.model, m.vocab.size(), 0);
  for (auto& [name, t] : m.params.named()) ckpt.restore(name, t);
  return m;
}

std::string GenModel::version() const {
  std::vector<std::string> parts;
  for (const auto& [name, t] : params.named()) {
    std::string bytes(reinterpret_cast<const char*>(t.values().data()), t.size() * sizeof(double));
    parts.push_back(name);
    parts.push_back(bytes);
  }
  parts.push_back(tensor::hex64(vocab.hash()));
  return "gen-" + tensor::hex64(tensor::vocab_hash(parts));
}

double evaluate_loss(const GenModel& model, std::span<const TextPair> pairs) {
  if (pairs.empty()) return std::numeric_limits<double>::quiet_NaN();
  tensor::NoGradGuard no_grad;
  double total = 0.0;
  for (const auto& p : pairs)
    total += sequence_loss(model.params, make_example(model.vocab, p.source, p.target)).item();
  return total / static_cast<double>(pairs.size());
}

GenTrainResult train_generator(std::span<const TextPair> train, std::span<const TextPair> val,
                               const GenTrainConfig& config) {
  if (train.empty()) throw ContractError("train_generator: empty training split");
  if (config.batch_size == 0) throw ContractError("train_generator: batch size must be positive");
  std::vector<std::vector<std::string>> texts;
  for (const auto& p : train) {
    texts.push_back(p.source);
    texts.push_back(p.target);
  }
  GenTrainResult result;
  GenModel& model = result.model;
  model.config = config;
  model.vocab = GenVocab::build(texts, config.min_freq);
  model.params = init_params(config.model, model.vocab.size(), config.seed);

  std::vector<GenExample> examples;
  for (const auto& p : train) examples.push_back(make_example(model.vocab, p.source, p.target));

  tensor::Optimizer opt(config.optimizer, config.learning_rate, model.params.trainable());
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  tensor::Tape::current().clear();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      if (config.max_steps && result.steps >= config.max_steps) break;
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      double batch_loss = 0.0;
      const double weight = 1.0 / static_cast<double>(end - start);
      // One example per backward pass keeps the tape short; grads accumulate.
      for (std::size_t i = start; i < end; ++i) {
        tensor::Tensor loss = tensor::scale(sequence_loss(model.params, examples[order[i]]), weight);
        batch_loss += loss.item();
        tensor::backward(loss);
      }
      tensor::clip_grad_norm(opt.params(), config.clip_norm);
      opt.step();
      ++result.steps;
      epoch_loss += batch_loss;
      ++batches;
    }
    if (batches == 0) break;
    GenEpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = epoch_loss / static_cast<double>(batches);
    entry.val_loss = evaluate_loss(model, val);
    entry.learning_rate = opt.learning_rate();
    result.log.push_back(entry);

    const double monitored = val.empty() ? entry.train_loss : entry.val_loss;
    if (monitored < best * (1.0 - 1e-4)) {
      best = monitored;
      stale = 0;
    } else if (++stale >= config.patience) {
      opt.set_learning_rate(opt.learning_rate() * config.lr_decay);
      stale = 0;
    }
  }
  return result;
}

GenTrainResult train_generator(const corpus::DatasetSplit& split, const GenTrainConfig& config) {
  auto train = text_pairs(split.train, config.use_cat, config.use_img);
  auto val = text_pairs(split.val, config.use_cat, config.use_img);
  return train_generator(train, val, config);
}

}  // namespace adcraft::generator
