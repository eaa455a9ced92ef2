#pragma once

// HTTP front end: POST /v1/refine, GET /v1/health and an optional static
// directory mounted at "/".

#include <memory>
#include <string>
#include <vector>

#include "adcraft/service/refiner.hpp"

namespace adcraft::service {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  ModelPaths models;
  std::string static_dir;
};

// Fills fields the caller left at their defaults from ADCRAFT_PORT,
// ADCRAFT_GEN_CHECKPOINT, ADCRAFT_KP_CHECKPOINT, ADCRAFT_TAG_CHECKPOINT and
// ADCRAFT_STATIC_DIR. `explicit_flags` names the fields set on the command
// line ("port", "gen-checkpoint", ...), which keep their values.
ServerConfig apply_env(ServerConfig config, const std::vector<std::string>& explicit_flags);

class Server {
 public:
  Server(std::shared_ptr<const Refiner> refiner, const std::string& static_dir = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and serves until stop(); returns false if the port cannot be bound.
  bool listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it (or -1); serve with run().
  int bind_any_port(const std::string& host);
  bool run();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace adcraft::service
