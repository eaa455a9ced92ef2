#include "adcraft/service/server.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>

#include "httplib.h"

namespace adcraft::service {

namespace {

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

ServerConfig apply_env(ServerConfig cfg, const std::vector<std::string>& explicit_flags) {
  auto given = [&](const char* flag) {
    return std::find(explicit_flags.begin(), explicit_flags.end(), flag) != explicit_flags.end();
  };
  if (const char* v = env("ADCRAFT_PORT"); v && !given("port")) {
    try {
      cfg.port = std::stoi(v);
    } catch (const std::exception&) {
      throw ContractError(std::string("ADCRAFT_PORT is not a port number: ") + v);
    }
  }
  if (const char* v = env("ADCRAFT_GEN_CHECKPOINT"); v && !given("gen-checkpoint"))
    cfg.models.generator = v;
  if (const char* v = env("ADCRAFT_KP_CHECKPOINT"); v && !given("kp-checkpoint"))
    cfg.models.keyphrase_ranker = v;
  if (const char* v = env("ADCRAFT_TAG_CHECKPOINT"); v && !given("tag-checkpoint"))
    cfg.models.tag_ranker = v;
  if (const char* v = env("ADCRAFT_STATIC_DIR"); v && !given("static-dir")) cfg.static_dir = v;
  return cfg;
}

struct Server::Impl {
  std::shared_ptr<const Refiner> refiner;
  httplib::Server http;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

}  // namespace

Server::Server(std::shared_ptr<const Refiner> refiner, const std::string& static_dir)
    : impl_(std::make_unique<Impl>()) {
  impl_->refiner = std::move(refiner);
  Impl* self = impl_.get();

  self->http.Post("/v1/refine", [self](const httplib::Request& req, httplib::Response& res) {
    try {
      nlohmann::json body;
      try {
        body = nlohmann::json::parse(req.body);
      } catch (const nlohmann::json::parse_error& e) {
        throw ServiceError(400, "invalid_json", e.what());
      }
      const RefineRequest request = parse_refine_request(body);
      send_json(res, 200, to_json(self->refiner->refine(request)));
    } catch (const ServiceError& e) {
      send_json(res, e.status(), error_body(e.code(), e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, error_body("internal", e.what()));
    }
  });

  self->http.Get("/v1/health", [self](const httplib::Request&, httplib::Response& res) {
    nlohmann::ordered_json j;
    j["status"] = self->refiner->ready() ? "ready" : "degraded";
    j["checkpoints"] = self->refiner->checkpoints();
    j["uptime_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - self->started).count();
    send_json(res, 200, j);
  });

  if (!static_dir.empty()) {
    if (!std::filesystem::is_directory(static_dir))
      throw ContractError("static dir is not a directory: " + static_dir);
    self->http.set_mount_point("/", static_dir);
  }
}

Server::~Server() { stop(); }

bool Server::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }

int Server::bind_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }

bool Server::run() { return impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

}  // namespace adcraft::service
