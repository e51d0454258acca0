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

#include "qir/session.hpp"

#include <algorithm>
#include <cmath>

#include "qir/error.hpp"

namespace qir::session {

using nlohmann::json;
using qprob::Ensemble;
using qprob::Subspace;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_alpha(double alpha, const char* what) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::parameter,
                std::string(what) + " must lie in [0, 1], got " + std::to_string(alpha));
  }
}

// Quantized so that values equal up to rounding noise tie and fall back to
// doc_id; a tolerance-based comparator would not be a strict weak order.
long long rank_key(double p) { return std::llround(p * 1e12); }

}  // namespace

std::string_view to_string(QueryMode mode) noexcept {
  return mode == QueryMode::prf ? "prf" : "term_union";
}

QueryMode parse_query_mode(std::string_view text) {
  if (text == "prf") return QueryMode::prf;
  if (text == "term_union" || text == "terms") return QueryMode::term_union;
  throw Error(ErrorKind::parameter, "unknown query mode '" + std::string(text) + "'");
}

qprob::Tolerances session_tolerances() {
  qprob::Tolerances tol;
  tol.compress_measured = true;
  return tol;
}

void SessionConfig::validate() const {
  check_alpha(alpha_click, "alpha_click");
  check_alpha(alpha_judgment, "alpha_judgment");
  if (!(drift_threshold > 0.0 && drift_threshold < 1.0)) {
    throw Error(ErrorKind::parameter, "drift threshold must lie in (0, 1)");
  }
  if (prf_k == 0) throw Error(ErrorKind::parameter, "prf_k must be >= 1");
  tolerances.validate();
}

Engine::Engine(std::shared_ptr<const corpus::Corpus> corpus, qprob::Tolerances tolerances)
    : corpus_(std::move(corpus)),
      tolerances_(tolerances),
      initial_(corpus::initial_density(*corpus_)) {
  tolerances_.validate();
  observables_.reserve(corpus_->documents().size());
  for (const auto& d : corpus_->documents()) {
    if (d.usable_paragraphs() == 0) {
      observables_.emplace_back();
    } else {
      observables_.emplace_back(corpus::document_observable(d, *corpus_, tolerances_));
    }
  }
}

Subspace Engine::document_observable(std::string_view doc_id, const qprob::Tolerances& tol) const {
  const auto idx = corpus_->document_index(doc_id);
  if (!idx) throw Error(ErrorKind::unknown_document, "unknown doc_id '" + std::string(doc_id) + "'");
  if (tol.ortho_eps != tolerances_.ortho_eps) {
    return corpus::document_observable(corpus_->documents()[*idx], *corpus_, tol);
  }
  if (!observables_[*idx]) {
    throw Error(ErrorKind::empty_document,
                "document '" + std::string(doc_id) + "' has no usable paragraph");
  }
  return *observables_[*idx];
}

Subspace Engine::query_observable(std::span<const std::string> terms,
                                  const SessionConfig& config) const {
  if (config.query_mode == QueryMode::prf) {
    return corpus::query_observable_prf(terms, *corpus_, config.prf_k, config.tolerances);
  }
  return corpus::query_observable_terms(terms, *corpus_, config.tolerances);
}

SessionState Engine::new_session(SessionConfig config, std::string session_id) const {
  config.validate();
  Ensemble rho = initial_;
  if (config.context) {
    if (config.context->dim() != corpus_->dim()) {
      throw Error(ErrorKind::dimension, "context observable does not live in the corpus space");
    }
    rho = qprob::condition(rho, *config.context, config.tolerances);
  }
  Ensemble start = rho;
  return SessionState{std::move(session_id), std::move(rho), std::move(start), {}, std::move(config)};
}

SessionDiagnostics Engine::handle_event(SessionState& state, const InteractionEvent& event) const {
  const SessionConfig& cfg = state.config;
  const qprob::Tolerances& tol = cfg.tolerances;
  SessionDiagnostics diag;

  // Soft measurement; an impossible one rebases on rho_0 with the same alpha.
  auto soft_update = [&](const Subspace& observable, double alpha) {
    diag.event_probability = qprob::probability(state.rho, observable);
    try {
      return qprob::alpha_update(state.rho, observable, alpha, tol);
    } catch (const ImpossibleMeasurement&) {
      diag.drift_flagged = true;
      diag.recovered = true;
      return qprob::alpha_update(initial_, observable, alpha, tol);
    }
  };

  Ensemble next = std::visit(
      overloaded{
          [&](const Query& q) {
            const auto terms = corpus_->tokenize(q.text);
            const Subspace observable = query_observable(terms, cfg);
            diag.event_probability = qprob::probability(state.rho, observable);
            if (diag.event_probability < cfg.drift_threshold) {
              diag.drift_flagged = true;
              return qprob::condition(initial_, observable, tol);
            }
            try {
              return qprob::condition(state.rho, observable, tol);
            } catch (const ImpossibleMeasurement&) {
              diag.drift_flagged = true;
              diag.recovered = true;
              return qprob::condition(initial_, observable, tol);
            }
          },
          [&](const Click& c) {
            const double alpha = c.alpha.value_or(cfg.alpha_click);
            check_alpha(alpha, "click alpha");
            return soft_update(document_observable(c.doc_id, tol), alpha);
          },
          [&](const Judgment& j) {
            const double alpha = j.alpha.value_or(cfg.alpha_judgment);
            check_alpha(alpha, "judgment alpha");
            Subspace observable = document_observable(j.doc_id, tol);
            if (!j.positive) observable = qprob::complement(observable);
            return soft_update(observable, alpha);
          },
          [&](const Reset&) { return state.start; },
      },
      event);

  diag.ensemble_rank = next.size();
  state.rho = std::move(next);
  state.history.push_back({event, diag});
  return diag;
}

std::vector<RankedDocument> Engine::rank(const SessionState& state, std::size_t n) const {
  if (n == 0) throw Error(ErrorKind::parameter, "rank needs n >= 1");
  const auto& docs = corpus_->documents();
  std::vector<RankedDocument> all;
  all.reserve(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double p = 0.0;
    if (observables_[i]) {
      p = state.config.tolerances.ortho_eps == tolerances_.ortho_eps
              ? qprob::probability(state.rho, *observables_[i])
              : qprob::probability(state.rho,
                                   corpus::document_observable(docs[i], *corpus_,
                                                               state.config.tolerances));
    }
    all.push_back({docs[i].doc_id, p});
  }
  std::sort(all.begin(), all.end(), [](const RankedDocument& a, const RankedDocument& b) {
    const auto ka = rank_key(a.probability);
    const auto kb = rank_key(b.probability);
    if (ka != kb) return ka > kb;
    return a.doc_id < b.doc_id;
  });
  if (all.size() > n) all.resize(n);
  return all;
}

double Engine::drift_probability(const SessionState& state,
                                 std::span<const std::string> terms) const {
  return qprob::probability(state.rho, query_observable(terms, state.config));
}

double Engine::drift_probability(const SessionState& state, std::string_view query_text) const {
  const auto terms = corpus_->tokenize(query_text);
  return drift_probability(state, terms);
}

json event_to_json(const InteractionEvent& event) {
  return std::visit(
      overloaded{
          [](const Query& q) { return json{{"type", "query"}, {"text", q.text}}; },
          [](const Click& c) {
            json j{{"type", "click"}, {"doc_id", c.doc_id}};
            if (c.alpha) j["alpha"] = *c.alpha;
            return j;
          },
          [](const Judgment& jd) {
            json j{{"type", "judgment"}, {"doc_id", jd.doc_id}, {"positive", jd.positive}};
            if (jd.alpha) j["alpha"] = *jd.alpha;
            return j;
          },
          [](const Reset&) { return json{{"type", "reset"}}; },
      },
      event);
}

InteractionEvent event_from_json(const json& j) {
  auto fail = [](const std::string& why) -> InteractionEvent {
    throw Error(ErrorKind::malformed_input, "invalid event: " + why);
  };
  if (!j.is_object()) return fail("expected an object");
  if (!j.contains("type") || !j["type"].is_string()) return fail("missing string 'type'");
  const auto type = j["type"].get<std::string>();

  auto doc_id = [&]() -> std::string {
    if (!j.contains("doc_id") || !j["doc_id"].is_string()) fail("missing string 'doc_id'");
    return j["doc_id"].get<std::string>();
  };
  auto alpha = [&]() -> std::optional<double> {
    if (!j.contains("alpha") || j["alpha"].is_null()) return std::nullopt;
    if (!j["alpha"].is_number()) fail("'alpha' must be a number");
    return j["alpha"].get<double>();
  };

  if (type == "query") {
    if (!j.contains("text") || !j["text"].is_string()) return fail("missing string 'text'");
    return Query{j["text"].get<std::string>()};
  }
  if (type == "click") return Click{doc_id(), alpha()};
  if (type == "judgment") {
    if (!j.contains("positive") || !j["positive"].is_boolean()) {
      return fail("missing boolean 'positive'");
    }
    return Judgment{doc_id(), j["positive"].get<bool>(), alpha()};
  }
  if (type == "reset") return Reset{};
  return fail("unknown type '" + type + "'");
}

json diagnostics_to_json(const SessionDiagnostics& d) {
  json j{{"p", d.event_probability}, {"drift", d.drift_flagged}, {"rank", d.ensemble_rank}};
  if (d.recovered) j["recovered"] = true;
  return j;
}

SessionDiagnostics diagnostics_from_json(const json& j) {
  SessionDiagnostics d;
  d.event_probability = j.at("p").get<double>();
  d.drift_flagged = j.at("drift").get<bool>();
  d.ensemble_rank = j.at("rank").get<std::size_t>();
  d.recovered = j.value("recovered", false);
  return d;
}

json log_record(std::size_t t, const HistoryEntry& entry) {
  return json{{"t", t},
              {"event", event_to_json(entry.event)},
              {"diag", diagnostics_to_json(entry.diagnostics)}};
}

}  // namespace qir::session
