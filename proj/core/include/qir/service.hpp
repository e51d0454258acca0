// Copyright 2026 The qir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file    service.hpp
 * @brief   HTTP+JSON frontend over session::Engine.
 *
 *   POST /sessions                 -> {"session_id"}
 *   POST /sessions/{id}/events     -> diagnostics of the applied event
 *   GET  /sessions/{id}/rank?n=10  -> ranked documents with probabilities
 *   GET  /sessions/{id}/drift?q=   -> what-if query probability
 *   GET  /sessions/{id}/state      -> ensemble rank, history, config
 *   GET  /corpus/docs/{doc_id}     -> document text
 *
 * Events for one session are applied strictly one at a time; distinct
 * sessions proceed in parallel.
 */

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "qir/session.hpp"

namespace qir::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  session::SessionConfig defaults;
  std::size_t max_dense_dim = 64;
  /// When set, every applied event is appended to <journal_dir>/<id>.jsonl.
  std::optional<std::filesystem::path> journal_dir;
  /// Sessions idle longer than this are evicted; zero disables eviction.
  std::chrono::seconds idle_timeout{0};
};

/// Applies {"alpha_click", "alpha_judgment", "tau", "query_mode", "prf_k",
/// "context"} overrides from a session-creation body. "context" is free text
/// turned into a term-union observable.
session::SessionConfig apply_overrides(session::SessionConfig base, const nlohmann::json& body,
                                       const session::Engine& engine);

class Service {
 public:
  Service(std::shared_ptr<const session::Engine> engine, ServiceConfig config);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Blocks until stop(). Returns false if the address could not be bound.
  bool listen();
  /// Binds an ephemeral port on config.host and returns it (-1 on failure);
  /// follow with listen_after_bind().
  int bind_to_any_port();
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

  /// Copy of a session's state, for diagnostics and tests.
  std::optional<session::SessionState> snapshot(const std::string& session_id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace qir::service
