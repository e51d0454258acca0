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

#include "qir/service.hpp"

#include <ctime>
#include <fstream>
#include <map>
#include <mutex>

#include <httplib.h>

#include "qir/error.hpp"
#include "qir/index.hpp"

namespace qir::service {

using nlohmann::json;
using Clock = std::chrono::system_clock;

namespace {

struct SessionHandle {
  std::string session_id;
  Clock::time_point created_at;
  Clock::time_point last_used;
  std::mutex mu;  // serializes events and snapshot reads
  std::optional<session::SessionState> state;  // set once created
  std::ofstream journal;
};

std::string iso8601(Clock::time_point tp) {
  const std::time_t t = Clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message,
                 std::string_view kind = "error") {
  reply(res, status, json{{"error", message}, {"kind", kind}});
}

json diagnostics_response(std::size_t t, const session::SessionDiagnostics& d) {
  json j{{"t", t},
         {"event_probability", d.event_probability},
         {"drift_flagged", d.drift_flagged},
         {"ensemble_rank", d.ensemble_rank}};
  if (d.recovered) j["recovered"] = true;
  return j;
}

json config_to_json(const session::SessionConfig& c) {
  return json{{"alpha_click", c.alpha_click},
              {"alpha_judgment", c.alpha_judgment},
              {"query_mode", session::to_string(c.query_mode)},
              {"prf_k", c.prf_k},
              {"tau", c.drift_threshold},
              {"context", c.context.has_value()}};
}

}  // namespace

session::SessionConfig apply_overrides(session::SessionConfig base, const json& body,
                                       const session::Engine& engine) {
  if (body.is_null()) return base;
  if (!body.is_object()) throw Error(ErrorKind::malformed_input, "config overrides must be an object");
  try {
    if (body.contains("alpha_click")) base.alpha_click = body["alpha_click"].get<double>();
    if (body.contains("alpha_judgment")) base.alpha_judgment = body["alpha_judgment"].get<double>();
    if (body.contains("tau")) base.drift_threshold = body["tau"].get<double>();
    if (body.contains("prf_k")) base.prf_k = body["prf_k"].get<std::size_t>();
    if (body.contains("query_mode")) {
      base.query_mode = session::parse_query_mode(body["query_mode"].get<std::string>());
    }
    if (body.contains("context") && !body["context"].is_null()) {
      const auto terms = engine.corpus().tokenize(body["context"].get<std::string>());
      base.context = corpus::query_observable_terms(terms, engine.corpus(), base.tolerances);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::malformed_input, std::string("bad config override: ") + e.what());
  }
  base.validate();
  return base;
}

struct Service::Impl {
  std::shared_ptr<const session::Engine> engine;
  ServiceConfig config;
  httplib::Server server;

  mutable std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<SessionHandle>> sessions;
  std::size_t next_id = 1;

  std::shared_ptr<SessionHandle> find(const std::string& id) const {
    std::lock_guard lock(sessions_mu);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  void evict_idle(Clock::time_point now) {
    if (config.idle_timeout.count() <= 0) return;
    std::lock_guard lock(sessions_mu);
    std::erase_if(sessions, [&](const auto& kv) {
      std::unique_lock session_lock(kv.second->mu, std::try_to_lock);
      return session_lock.owns_lock() && now - kv.second->last_used > config.idle_timeout;
    });
  }

  void create_session(const httplib::Request& req, httplib::Response& res) {
    json body;
    if (!req.body.empty()) {
      try {
        body = json::parse(req.body);
      } catch (const json::parse_error& e) {
        return reply_error(res, 422, std::string("body is not JSON: ") + e.what(), "malformed_input");
      }
    }
    const auto now = Clock::now();
    evict_idle(now);

    auto handle = std::make_shared<SessionHandle>();
    {
      std::lock_guard lock(sessions_mu);
      char id[32];
      std::snprintf(id, sizeof id, "s%06zu", next_id++);
      handle->session_id = id;
    }
    try {
      auto cfg = apply_overrides(config.defaults, body, *engine);
      handle->state = engine->new_session(std::move(cfg), handle->session_id);
    } catch (const Error& e) {
      return reply_error(res, 422, e.what(), to_string(e.kind()));
    }
    handle->created_at = handle->last_used = now;
    if (config.journal_dir) {
      handle->journal.open(*config.journal_dir / (handle->session_id + ".jsonl"),
                           std::ios::binary | std::ios::trunc);
    }
    {
      std::lock_guard lock(sessions_mu);
      sessions.emplace(handle->session_id, handle);
    }
    reply(res, 201, json{{"session_id", handle->session_id}, {"created_at", iso8601(now)}});
  }

  void submit_event(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    auto handle = find(id);
    if (!handle) return reply_error(res, 404, "unknown session '" + id + "'", "not_found");

    session::InteractionEvent event;
    try {
      event = session::event_from_json(json::parse(req.body));
    } catch (const json::parse_error& e) {
      return reply_error(res, 422, std::string("body is not JSON: ") + e.what(), "malformed_input");
    } catch (const Error& e) {
      return reply_error(res, 422, e.what(), to_string(e.kind()));
    }

    std::lock_guard lock(handle->mu);
    handle->last_used = Clock::now();
    session::SessionDiagnostics diag;
    try {
      diag = engine->handle_event(*handle->state, event);
    } catch (const Error& e) {
      return reply_error(res, 422, e.what(), to_string(e.kind()));
    }
    const std::size_t t = handle->state->history.size() - 1;
    if (handle->journal.is_open()) {
      handle->journal << session::log_record(t, handle->state->history.back()).dump() << '\n';
      handle->journal.flush();
    }
    reply(res, 200, diagnostics_response(t, diag));
  }

  void rank(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    auto handle = find(id);
    if (!handle) return reply_error(res, 404, "unknown session '" + id + "'", "not_found");
    std::size_t n = 10;
    if (req.has_param("n")) {
      try {
        const long long v = std::stoll(req.get_param_value("n"));
        if (v < 1) throw std::out_of_range("n");
        n = static_cast<std::size_t>(v);
      } catch (const std::exception&) {
        return reply_error(res, 422, "n must be a positive integer", "parameter");
      }
    }
    std::vector<session::RankedDocument> ranking;
    {
      std::lock_guard lock(handle->mu);
      handle->last_used = Clock::now();
      ranking = engine->rank(*handle->state, n);
    }
    json results = json::array();
    for (const auto& r : ranking) {
      results.push_back(json{{"doc_id", r.doc_id},
                             {"title", engine->corpus().find(r.doc_id)->title},
                             {"probability", r.probability}});
    }
    reply(res, 200, json{{"session_id", id}, {"results", results}});
  }

  void drift(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    auto handle = find(id);
    if (!handle) return reply_error(res, 404, "unknown session '" + id + "'", "not_found");
    if (!req.has_param("q")) return reply_error(res, 422, "missing query parameter q", "parameter");
    const std::string q = req.get_param_value("q");
    double p = 0.0;
    double tau = 0.0;
    try {
      std::lock_guard lock(handle->mu);
      handle->last_used = Clock::now();
      p = engine->drift_probability(*handle->state, q);
      tau = handle->state->config.drift_threshold;
    } catch (const Error& e) {
      return reply_error(res, 422, e.what(), to_string(e.kind()));
    }
    reply(res, 200, json{{"query", q}, {"probability", p}, {"threshold", tau}, {"drift", p < tau}});
  }

  void state(const std::string& id, const httplib::Request& req, httplib::Response& res) {
    auto handle = find(id);
    if (!handle) return reply_error(res, 404, "unknown session '" + id + "'", "not_found");
    const bool want_dense = req.has_param("dense") && req.get_param_value("dense") != "0" &&
                            req.get_param_value("dense") != "false";
    std::lock_guard lock(handle->mu);
    handle->last_used = Clock::now();
    const auto& s = *handle->state;
    json history = json::array();
    for (std::size_t t = 0; t < s.history.size(); ++t) {
      history.push_back(session::log_record(t, s.history[t]));
    }
    const std::size_t dim = s.rho.dim();
    json body{{"session_id", id},
              {"created_at", iso8601(handle->created_at)},
              {"dim", dim},
              {"max_dense_dim", config.max_dense_dim},
              {"dense_available", dim <= config.max_dense_dim},
              {"ensemble_rank", s.rho.size()},
              {"history_length", s.history.size()},
              {"last_diagnostics", s.history.empty() ? json(nullptr)
                                                     : diagnostics_response(s.history.size() - 1,
                                                                            s.history.back().diagnostics)},
              {"history", history},
              {"config", config_to_json(s.config)}};
    if (want_dense && dim <= config.max_dense_dim) {
      body["dense"] = index::dense_to_json(qprob::to_dense(s.rho, config.max_dense_dim));
    }
    reply(res, 200, body);
  }

  void document(const std::string& doc_id, httplib::Response& res) {
    const auto* d = engine->corpus().find(doc_id);
    if (!d) return reply_error(res, 404, "unknown doc_id '" + doc_id + "'", "not_found");
    json paragraphs = json::array();
    for (const auto& p : d->paragraphs) paragraphs.push_back(p.text);
    reply(res, 200, json{{"doc_id", d->doc_id}, {"title", d->title}, {"paragraphs", paragraphs}});
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      create_session(req, res);
    });
    server.Post(R"(/sessions/([^/]+)/events)", [this](const httplib::Request& req, httplib::Response& res) {
      submit_event(req.matches[1], req, res);
    });
    server.Get(R"(/sessions/([^/]+)/rank)", [this](const httplib::Request& req, httplib::Response& res) {
      rank(req.matches[1], req, res);
    });
    server.Get(R"(/sessions/([^/]+)/drift)", [this](const httplib::Request& req, httplib::Response& res) {
      drift(req.matches[1], req, res);
    });
    server.Get(R"(/sessions/([^/]+)/state)", [this](const httplib::Request& req, httplib::Response& res) {
      state(req.matches[1], req, res);
    });
    server.Get(R"(/corpus/docs/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
      document(req.matches[1], res);
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        reply_error(res, 500, e.what(), "internal");
      } catch (...) {
        reply_error(res, 500, "unknown failure", "internal");
      }
    });
  }
};

Service::Service(std::shared_ptr<const session::Engine> engine, ServiceConfig config)
    : impl_(std::make_unique<Impl>()) {
  config.defaults.validate();
  if (config.journal_dir) std::filesystem::create_directories(*config.journal_dir);
  impl_->engine = std::move(engine);
  impl_->config = std::move(config);
  impl_->routes();
}

Service::~Service() { stop(); }

bool Service::listen() { return impl_->server.listen(impl_->config.host, impl_->config.port); }

int Service::bind_to_any_port() { return impl_->server.bind_to_any_port(impl_->config.host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

std::optional<session::SessionState> Service::snapshot(const std::string& session_id) const {
  auto handle = impl_->find(session_id);
  if (!handle) return std::nullopt;
  std::lock_guard lock(handle->mu);
  return handle->state;
}

}  // namespace qir::service
