#pragma once

// Request handling for the refinement service, independent of HTTP.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adcraft/errors.hpp"
#include "adcraft/generator/train.hpp"
#include "adcraft/ranker/train.hpp"
#include "json.hpp"

namespace adcraft::service {

// A request that cannot be served; carries the HTTP status and error code.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : Error(message), status_(status), code_(std::move(code)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int status_;
  std::string code_;
};

inline constexpr std::size_t kMaxBeamWidth = 16;

struct RefineRequest {
  std::string text;
  std::string category;
  std::vector<std::string> image_tags;
  std::size_t top_k = 10;
  std::size_t beam_width = 1;
};

struct RefineResponse {
  std::string generated_text;
  double generation_log_prob = 0.0;
  ranker::RankedList keyphrases;
  ranker::RankedList image_tags;
  nlohmann::ordered_json model_versions;
};

// Throws ServiceError(400) on a malformed body, wrong field types, a
// non-positive top_k or a beam_width outside 1..kMaxBeamWidth.
RefineRequest parse_refine_request(const nlohmann::json& body);
nlohmann::ordered_json to_json(const RefineResponse& response);
nlohmann::ordered_json error_body(const std::string& code, const std::string& message);

struct ModelPaths {
  std::filesystem::path generator;
  std::filesystem::path keyphrase_ranker;
  std::filesystem::path tag_ranker;
};

// Immutable model set. refine() only reads it, so one instance serves any
// number of threads.
class Refiner {
 public:
  Refiner() = default;
  Refiner(std::optional<generator::GenModel> gen, std::optional<ranker::RankModel> kp,
          std::optional<ranker::RankModel> tag);
  // Loads every non-empty path; a bad checkpoint throws.
  static Refiner load(const ModelPaths& paths);

  bool ready() const { return gen_ && kp_ && tag_; }
  // {"generator": version or null, "keyphrase_ranker": ..., "tag_ranker": ...}
  nlohmann::ordered_json checkpoints() const;

  // Throws ServiceError: 503 unless ready(), 400 for empty text or a top_k
  // above the keyphrase vocabulary size.
  RefineResponse refine(const RefineRequest& request) const;

 private:
  std::optional<generator::GenModel> gen_;
  std::optional<ranker::RankModel> kp_;
  std::optional<ranker::RankModel> tag_;
};

}  // namespace adcraft::service
