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
 * @file    session.hpp
 * @brief   Per-session information-need state driven by interaction events.
 *
 * A session starts from rho_0 (optionally conditioned on a user-context
 * observable). Queries condition the state hard, clicks and judgments blend
 * the measured state in with weight alpha, and a query the current state
 * finds improbable (below the drift threshold) rebases the session on a new
 * information need.
 */

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qir/corpus.hpp"
#include "qir/qprob.hpp"

namespace qir::session {

enum class QueryMode { prf, term_union };

std::string_view to_string(QueryMode mode) noexcept;
QueryMode parse_query_mode(std::string_view text);

/// Tolerances sessions run with: kernel defaults plus exact compression of
/// measured components, which keeps the ensemble from doubling per click.
qprob::Tolerances session_tolerances();

struct SessionConfig {
  double alpha_click = 0.3;
  double alpha_judgment = 0.6;
  QueryMode query_mode = QueryMode::prf;
  std::size_t prf_k = 5;
  double drift_threshold = 0.1;
  qprob::Tolerances tolerances = session_tolerances();
  std::optional<qprob::Subspace> context;

  void validate() const;
};

struct Query {
  std::string text;
};

/// `alpha` overrides SessionConfig::alpha_click for this event only.
struct Click {
  std::string doc_id;
  std::optional<double> alpha;
};

struct Judgment {
  std::string doc_id;
  bool positive = true;
  std::optional<double> alpha;
};

struct Reset {};

using InteractionEvent = std::variant<Query, Click, Judgment, Reset>;

struct SessionDiagnostics {
  double event_probability = 1.0;  // under rho before the update
  bool drift_flagged = false;
  std::size_t ensemble_rank = 0;
  bool recovered = false;  // an impossible measurement was absorbed by rebasing

  friend bool operator==(const SessionDiagnostics&, const SessionDiagnostics&) = default;
};

struct HistoryEntry {
  InteractionEvent event;
  SessionDiagnostics diagnostics;
};

struct SessionState {
  std::string session_id;
  qprob::Ensemble rho;
  qprob::Ensemble start;  // rho right after new_session, restored by Reset
  std::vector<HistoryEntry> history;
  SessionConfig config;
};

struct RankedDocument {
  std::string doc_id;
  double probability;
};

/// Corpus plus the observables every session needs. Immutable and shareable
/// across threads.
class Engine {
 public:
  explicit Engine(std::shared_ptr<const corpus::Corpus> corpus,
                  qprob::Tolerances tolerances = session_tolerances());

  const corpus::Corpus& corpus() const noexcept { return *corpus_; }
  const qprob::Tolerances& tolerances() const noexcept { return tolerances_; }
  const qprob::Ensemble& initial_density() const noexcept { return initial_; }

  /// Throws Error(unknown_document) or Error(empty_document).
  qprob::Subspace document_observable(std::string_view doc_id, const qprob::Tolerances& tol) const;

  qprob::Subspace query_observable(std::span<const std::string> terms,
                                   const SessionConfig& config) const;

  SessionState new_session(SessionConfig config, std::string session_id = {}) const;

  /// Applies the event in place and appends it to the history. On error the
  /// state is left untouched.
  SessionDiagnostics handle_event(SessionState& state, const InteractionEvent& event) const;

  /// Top-n documents by Pr_rho(O_d). Ties (to 1e-12) go to the smaller doc_id.
  std::vector<RankedDocument> rank(const SessionState& state, std::size_t n) const;

  /// What-if Pr_rho(O_q) for a query; does not touch the state.
  double drift_probability(const SessionState& state, std::span<const std::string> terms) const;
  double drift_probability(const SessionState& state, std::string_view query_text) const;

 private:
  std::shared_ptr<const corpus::Corpus> corpus_;
  qprob::Tolerances tolerances_;
  qprob::Ensemble initial_;
  std::vector<std::optional<qprob::Subspace>> observables_;  // per document, empty if unusable
};

nlohmann::json event_to_json(const InteractionEvent& event);
/// Throws Error(malformed_input) with a reason.
InteractionEvent event_from_json(const nlohmann::json& j);

/// {"p", "drift", "rank"} plus "recovered" when set.
nlohmann::json diagnostics_to_json(const SessionDiagnostics& d);
SessionDiagnostics diagnostics_from_json(const nlohmann::json& j);

/// One session-log line: {"t", "event", "diag"}.
nlohmann::json log_record(std::size_t t, const HistoryEntry& entry);

}  // namespace qir::session
