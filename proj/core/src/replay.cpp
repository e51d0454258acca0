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

#include "qir/replay.hpp"

#include <fstream>

#include "qir/error.hpp"

namespace qir::replay {

using nlohmann::json;

namespace {

session::InteractionEvent with_alpha(session::InteractionEvent event, double alpha) {
  if (auto* c = std::get_if<session::Click>(&event)) c->alpha = alpha;
  if (auto* j = std::get_if<session::Judgment>(&event)) j->alpha = alpha;
  return event;
}

std::string where(const LoggedEvent& e) {
  std::string s = "event t=" + std::to_string(e.t);
  if (e.line != 0) s += " (line " + std::to_string(e.line) + ")";
  return s;
}

// Applies every event, rethrowing failures tagged with the event position.
template <typename OnStep>
session::SessionState run(const session::Engine& engine, const std::vector<LoggedEvent>& events,
                          const session::SessionConfig& config,
                          const std::optional<double>& forced_alpha, OnStep&& on_step) {
  auto state = engine.new_session(config, "replay");
  for (const auto& e : events) {
    try {
      const auto event = forced_alpha ? with_alpha(e.event, *forced_alpha) : e.event;
      engine.handle_event(state, event);
    } catch (const Error& err) {
      throw Error(err.kind(), where(e) + ": " + err.what());
    }
    on_step(e, state);
  }
  return state;
}

}  // namespace

std::vector<LoggedEvent> read_session_log(std::istream& in) {
  std::vector<LoggedEvent> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(text);
      if (!j.is_object() || !j.contains("event")) {
        throw Error(ErrorKind::malformed_input, "expected {\"t\", \"event\"}");
      }
      const std::size_t t = j.contains("t") ? j["t"].get<std::size_t>() : out.size();
      out.push_back({t, session::event_from_json(j["event"]), line});
    } catch (const json::exception& e) {
      throw Error(ErrorKind::malformed_input, "line " + std::to_string(line) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::vector<LoggedEvent> read_session_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::malformed_input, "cannot open " + path.string());
  return read_session_log(in);
}

ReplayResult replay(const session::Engine& engine, const std::vector<LoggedEvent>& events,
                    const ReplayOptions& options) {
  std::vector<json> enriched;
  auto state = run(engine, events, options.config, std::nullopt,
                   [&](const LoggedEvent& e, const session::SessionState& s) {
                     enriched.push_back(session::log_record(e.t, s.history.back()));
                   });

  ReplayResult result{std::move(state), std::move(enriched), {}, std::nullopt};
  result.final_ranking = engine.rank(result.final_state, options.top_n);

  if (options.compare) {
    struct Variant {
      std::string label;
      std::optional<double> alpha;
    };
    const Variant variants[] = {{"0", 0.0}, {"configured", std::nullopt}, {"1", 1.0}};
    json trajectories = json::array();
    for (const auto& v : variants) {
      json steps = json::array();
      steps.push_back(json{{"t", nullptr}, {"ranking", ranking_to_json(engine.rank(
                                                           engine.new_session(options.config),
                                                           options.top_n))}});
      run(engine, events, options.config, v.alpha,
          [&](const LoggedEvent& e, const session::SessionState& s) {
            steps.push_back(
                json{{"t", e.t}, {"ranking", ranking_to_json(engine.rank(s, options.top_n))}});
          });
      json entry{{"alpha", v.label}, {"steps", steps}};
      if (v.alpha) entry["value"] = *v.alpha;
      trajectories.push_back(std::move(entry));
    }
    result.compare = std::move(trajectories);
  }
  return result;
}

std::string dump_log(const std::vector<json>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

json ranking_to_json(const std::vector<session::RankedDocument>& ranking) {
  json out = json::array();
  for (const auto& r : ranking) out.push_back(json{{"doc_id", r.doc_id}, {"p", r.probability}});
  return out;
}

}  // namespace qir::replay
