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

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qir/session.hpp"

namespace qir::replay {

struct LoggedEvent {
  std::size_t t;
  session::InteractionEvent event;
  std::size_t line;  // 1-based position in the source log, 0 if synthetic
};

/// Session-log JSON Lines. Any "diag" field present is ignored. Lines without
/// "t" are numbered by position.
std::vector<LoggedEvent> read_session_log(std::istream& in);
std::vector<LoggedEvent> read_session_log(const std::filesystem::path& path);

struct ReplayOptions {
  session::SessionConfig config;
  std::size_t top_n = 10;
  bool compare = false;
};

struct ReplayResult {
  session::SessionState final_state;
  std::vector<nlohmann::json> enriched;  // one session-log record per event
  std::vector<session::RankedDocument> final_ranking;
  std::optional<nlohmann::json> compare;
};

/// Runs the events through a fresh session. A failing event is reported as
/// Error(kind) with a message naming its t and source line.
ReplayResult replay(const session::Engine& engine, const std::vector<LoggedEvent>& events,
                    const ReplayOptions& options);

/// Enriched log, one compact JSON record per line.
std::string dump_log(const std::vector<nlohmann::json>& records);

nlohmann::json ranking_to_json(const std::vector<session::RankedDocument>& ranking);

}  // namespace qir::replay
