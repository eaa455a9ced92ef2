#include "adcraft/service/refiner.hpp"

#include <algorithm>
#include <set>

#include "adcraft/corpus/ad_record.hpp"
#include "adcraft/corpus/pairs.hpp"
#include "adcraft/generator/decode.hpp"
#include "adcraft/ranker/triples.hpp"
#include "adcraft/tensor/tensor.hpp"

namespace adcraft::service {

namespace {

ServiceError bad_request(const std::string& code, const std::string& message) {
  return ServiceError(400, code, message);
}

std::size_t positive_field(const nlohmann::json& body, const char* name, std::size_t fallback) {
  if (!body.contains(name)) return fallback;
  const auto& v = body.at(name);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    throw bad_request(std::string("invalid_") + name,
                      std::string(name) + " must be a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

nlohmann::ordered_json ranked_json(const ranker::RankedList& list) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& item : list) out.push_back({{"text", item.text}, {"score", item.score}});
  return out;
}

}  // namespace

RefineRequest parse_refine_request(const nlohmann::json& body) {
  if (!body.is_object()) throw bad_request("invalid_request", "request body must be an object");
  RefineRequest req;
  if (!body.contains("text") || !body.at("text").is_string())
    throw bad_request("invalid_text", "text must be a string");
  req.text = body.at("text").get<std::string>();
  if (body.contains("category")) {
    if (!body.at("category").is_string())
      throw bad_request("invalid_category", "category must be a string");
    req.category = body.at("category").get<std::string>();
  }
  if (body.contains("image_tags")) {
    const auto& tags = body.at("image_tags");
    if (!tags.is_array()) throw bad_request("invalid_image_tags", "image_tags must be a list");
    for (const auto& t : tags) {
      if (!t.is_string())
        throw bad_request("invalid_image_tags", "image_tags must hold strings");
      req.image_tags.push_back(t.get<std::string>());
    }
  }
  req.top_k = positive_field(body, "top_k", req.top_k);
  req.beam_width = positive_field(body, "beam_width", req.beam_width);
  if (req.beam_width > kMaxBeamWidth)
    throw bad_request("invalid_beam_width",
                      "beam_width must be at most " + std::to_string(kMaxBeamWidth));
  return req;
}

nlohmann::ordered_json to_json(const RefineResponse& r) {
  nlohmann::ordered_json j;
  j["generated_text"] = r.generated_text;
  j["generation_log_prob"] = r.generation_log_prob;
  j["keyphrases"] = ranked_json(r.keyphrases);
  j["image_tags"] = ranked_json(r.image_tags);
  j["model_versions"] = r.model_versions;
  return j;
}

nlohmann::ordered_json error_body(const std::string& code, const std::string& message) {
  return {{"code", code}, {"message", message}};
}

Refiner::Refiner(std::optional<generator::GenModel> gen, std::optional<ranker::RankModel> kp,
                 std::optional<ranker::RankModel> tag)
    : gen_(std::move(gen)), kp_(std::move(kp)), tag_(std::move(tag)) {}

Refiner Refiner::load(const ModelPaths& paths) {
  std::optional<generator::GenModel> gen;
  std::optional<ranker::RankModel> kp, tag;
  if (!paths.generator.empty())
    gen = generator::GenModel::from_checkpoint(tensor::load_checkpoint(paths.generator));
  if (!paths.keyphrase_ranker.empty())
    kp = ranker::RankModel::from_checkpoint(tensor::load_checkpoint(paths.keyphrase_ranker));
  if (!paths.tag_ranker.empty())
    tag = ranker::RankModel::from_checkpoint(tensor::load_checkpoint(paths.tag_ranker));
  if (kp && kp->config.task != ranker::RankTask::kKeyphrase)
    throw ContractError("keyphrase checkpoint was trained for the tag task");
  if (tag && tag->config.task != ranker::RankTask::kImageTag)
    throw ContractError("tag checkpoint was trained for the keyphrase task");
  return Refiner(std::move(gen), std::move(kp), std::move(tag));
}

nlohmann::ordered_json Refiner::checkpoints() const {
  nlohmann::ordered_json j;
  j["generator"] = gen_ ? nlohmann::ordered_json(gen_->version()) : nullptr;
  j["keyphrase_ranker"] = kp_ ? nlohmann::ordered_json(kp_->version()) : nullptr;
  j["tag_ranker"] = tag_ ? nlohmann::ordered_json(tag_->version()) : nullptr;
  return j;
}

RefineResponse Refiner::refine(const RefineRequest& req) const {
  if (!ready()) throw ServiceError(503, "models_not_loaded", "models are not loaded");
  const auto text = corpus::tokenize(req.text);
  if (text.empty()) throw bad_request("empty_text", "text is empty after tokenization");
  if (req.top_k == 0 || req.top_k > kp_->candidates.size())
    throw bad_request("invalid_top_k", "top_k must be between 1 and " +
                                           std::to_string(kp_->candidates.size()));

  std::set<std::string> tag_set;
  for (const auto& t : req.image_tags) {
    auto tok = corpus::as_token(t);
    if (!tok.empty()) tag_set.insert(std::move(tok));
  }
  const std::vector<std::string> tags(tag_set.begin(), tag_set.end());

  tensor::NoGradGuard no_grad;
  RefineResponse out;

  corpus::CreativePair pair;
  pair.source.text = text;
  pair.source.category = req.category;
  pair.source_tags = tags;
  const auto source = corpus::augment_input(pair, gen_->config.use_cat, gen_->config.use_img);
  const auto beams = generator::beam_decode(gen_->params, gen_->vocab, source, req.beam_width);
  out.generated_text = corpus::join_tokens(beams.front().tokens);
  out.generation_log_prob = beams.front().log_prob;

  auto rank = [&](const ranker::RankModel& m) {
    const auto q =
        ranker::make_query(text, req.category, tags, m.config.use_cat, m.config.use_img);
    return ranker::top_k(m.rank(q), req.top_k);
  };
  out.keyphrases = rank(*kp_);
  out.image_tags = rank(*tag_);
  out.model_versions = checkpoints();
  return out;
}

}  // namespace adcraft::service
