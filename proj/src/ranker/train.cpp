#include "adcraft/ranker/train.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "adcraft/errors.hpp"
#include "adcraft/tensor/ops.hpp"
#include "adcraft/tensor/optim.hpp"

namespace adcraft::ranker {

RankedList RankModel::rank(std::span<const std::string> query) const {
  tensor::NoGradGuard no_grad;
  RankedList out;
  if (candidates.empty()) return out;
  const auto q = terms.ids(query);
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out.push_back({candidates[i], score(params, q, candidate_ids[i]).item()});
  sort_ranked(out);
  return out;
}

double RankModel::score_candidate(std::span<const std::string> query,
                                  const std::string& candidate) const {
  tensor::NoGradGuard no_grad;
  const auto q = terms.ids(query);
  const auto terms_c = candidate_terms(candidate);
  return score(params, q, terms.ids(terms_c)).item();
}

namespace {

nlohmann::json hyper_json(const RankTrainConfig& c) {
  return {{"embed_dim", c.model.embed_dim}, {"hidden", c.model.hidden},
          {"k", c.model.k},                 {"task", std::string(rank_task_name(c.task))},
          {"learning_rate", c.learning_rate}, {"epochs", c.epochs},
          {"batch_size", c.batch_size},     {"negatives", c.negatives},
          {"seed", c.seed},                 {"use_cat", c.use_cat},
          {"use_img", c.use_img}};
}

RankTrainConfig config_from_json(const nlohmann::json& j) {
  RankTrainConfig c;
  c.model.embed_dim = j.at("embed_dim");
  c.model.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  c.model.k = j.at("k");
  c.task = parse_rank_task(j.at("task").get<std::string>());
  c.learning_rate = j.at("learning_rate");
  c.epochs = j.at("epochs");
  c.batch_size = j.at("batch_size");
  c.negatives = j.at("negatives");
  c.seed = j.at("seed");
  c.use_cat = j.at("use_cat");
  c.use_img = j.at("use_img");
  return c;
}

void index_candidates(RankModel& m) {
  m.candidate_ids.clear();
  for (const auto& c : m.candidates) {
    const auto t = candidate_terms(c);
    if (t.empty()) throw ContractError("ranker: empty candidate");
    m.candidate_ids.push_back(m.terms.ids(t));
  }
}

}  // namespace

tensor::Checkpoint RankModel::to_checkpoint() const {
  tensor::Checkpoint ckpt;
  ckpt.model_kind = "ranker";
  ckpt.hyper = hyper_json(config);
  ckpt.vocab_hashes = {{"terms", tensor::hex64(tensor::vocab_hash(terms.words()))},
                       {"candidates", tensor::hex64(tensor::vocab_hash(candidates))}};
  ckpt.extras = {{"terms", terms.words()}, {"candidates", candidates}};
  for (const auto& [name, t] : params.named()) ckpt.add(name, t);
  return ckpt;
}

RankModel RankModel::from_checkpoint(const tensor::Checkpoint& ckpt) {
  if (ckpt.model_kind != "ranker")
    throw ContractError("checkpoint holds a '" + ckpt.model_kind + "' model, not a ranker");
  RankModel m;
  m.config = config_from_json(ckpt.hyper);
  m.terms = TermVocab(ckpt.extras.at("terms").get<std::vector<std::string>>());
  m.candidates = ckpt.extras.at("candidates").get<std::vector<std::string>>();
  if (tensor::hex64(tensor::vocab_hash(m.terms.words())) != ckpt.vocab_hashes.at("terms") ||
      tensor::hex64(tensor::vocab_hash(m.candidates)) != ckpt.vocab_hashes.at("candidates"))
    throw ContractError("ranker checkpoint: vocabulary hash mismatch");
  index_candidates(m);
  m.params = init_rank_params(m.config.model, m.terms.size(), 0);
  for (auto& [name, t] : m.params.named()) ckpt.restore(name, t);
  return m;
}

std::string RankModel::version() const {
  std::vector<std::string> parts;
  for (const auto& [name, t] : params.named()) {
    parts.push_back(name);
    parts.emplace_back(reinterpret_cast<const char*>(t.values().data()),
                       t.size() * sizeof(double));
  }
  parts.insert(parts.end(), candidates.begin(), candidates.end());
  return "rank-" + tensor::hex64(tensor::vocab_hash(parts));
}

RankTrainResult train_ranker(std::span<const RankExample> examples,
                             std::span<const std::string> candidates,
                             const RankTrainConfig& config, const WordVectors* warm_start) {
  RankTrainResult result;
  RankModel& m = result.model;
  m.config = config;
  m.candidates.assign(candidates.begin(), candidates.end());

  std::set<std::string> term_set;
  for (const auto& ex : examples) term_set.insert(ex.query.begin(), ex.query.end());
  for (const auto& c : candidates)
    for (auto& t : candidate_terms(c)) term_set.insert(t);
  term_set.erase("<unk>");
  m.terms = TermVocab(std::vector<std::string>(term_set.begin(), term_set.end()));
  index_candidates(m);
  m.params = init_rank_params(config.model, m.terms.size(), config.seed);
  if (warm_start && warm_start->dim() == config.model.embed_dim) {
    auto emb = m.params.embedding.mutable_values();
    for (std::size_t i = 1; i < m.terms.size(); ++i)
      if (const auto* v = warm_start->find(m.terms.term(i)))
        std::copy(v->begin(), v->end(), emb.begin() + i * config.model.embed_dim);
  }

  const auto triples = build_triples(examples, candidates, config.negatives, config.seed);
  if (triples.empty()) throw ContractError("train_ranker: no training triples");
  result.triples = triples.size();
  std::vector<std::vector<std::size_t>> query_ids;
  for (const auto& ex : examples) query_ids.push_back(m.terms.ids(ex.query));
  std::map<std::string, std::size_t> cand_index;
  for (std::size_t i = 0; i < m.candidates.size(); ++i) cand_index.emplace(m.candidates[i], i);
  std::vector<std::vector<std::size_t>> pos_ids, neg_ids;
  for (const auto& t : triples) {
    pos_ids.push_back(m.candidate_ids[cand_index.at(t.positive)]);
    neg_ids.push_back(m.candidate_ids[cand_index.at(t.negative)]);
  }

  tensor::Optimizer opt(tensor::OptimizerKind::kAdam, config.learning_rate, m.params.all());
  std::mt19937_64 rng(config.seed ^ 0x2545f4914f6cdd1dULL);
  std::vector<std::size_t> order(triples.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, config.batch_size);
  tensor::Tape::current().clear();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    std::size_t active = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double weight = 1.0 / static_cast<double>(end - start);
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t t = order[i];
        const auto& q = query_ids[triples[t].example];
        Tensor loss = hinge_loss(score(m.params, q, pos_ids[t]), score(m.params, q, neg_ids[t]));
        total += loss.item();
        if (loss.item() > 0.0) {
          ++active;
          tensor::backward(tensor::scale(loss, weight));
        } else {
          tensor::Tape::current().clear();
        }
      }
      // Adam needs a grad on every tensor, even when the batch was all flat.
      for (Tensor& p : opt.params()) p.mutable_grad();
      opt.step();
    }
    result.log.push_back({epoch, total / static_cast<double>(triples.size()),
                          static_cast<double>(active) / static_cast<double>(triples.size())});
  }
  return result;
}

}  // namespace adcraft::ranker
