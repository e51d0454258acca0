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

// qir index | replay | serve

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "qir/corpus.hpp"
#include "qir/error.hpp"
#include "qir/index.hpp"
#include "qir/replay.hpp"
#include "qir/service.hpp"
#include "qir/session.hpp"

namespace {

struct SessionFlags {
  double alpha_click = 0.3;
  double alpha_judgment = 0.6;
  double tau = 0.1;
  std::string query_mode = "prf";
  std::size_t prf_k = 5;

  void attach(CLI::App& app) {
    app.add_option("--alpha-click", alpha_click, "alpha for click events")->capture_default_str();
    app.add_option("--alpha-judgment", alpha_judgment, "alpha for relevance judgments")
        ->capture_default_str();
    app.add_option("--tau", tau, "drift threshold on the query probability")->capture_default_str();
    app.add_option("--query-mode", query_mode, "query observable: prf or term_union")
        ->check(CLI::IsMember({"prf", "term_union"}))
        ->capture_default_str();
    app.add_option("--prf-k", prf_k, "documents joined by pseudo-relevance feedback")
        ->capture_default_str();
  }

  qir::session::SessionConfig config() const {
    qir::session::SessionConfig c;
    c.alpha_click = alpha_click;
    c.alpha_judgment = alpha_judgment;
    c.drift_threshold = tau;
    c.query_mode = qir::session::parse_query_mode(query_mode);
    c.prf_k = prf_k;
    c.validate();
    return c;
  }
};

// QIR_INDEX wins over --index.
std::string resolve_index(const std::string& flag) {
  if (const char* env = std::getenv("QIR_INDEX"); env != nullptr && *env != '\0') return env;
  if (flag.empty()) throw qir::Error(qir::ErrorKind::parameter, "--index (or QIR_INDEX) is required");
  return flag;
}

int run_index(const std::string& input, const std::string& output, std::size_t min_df,
              const std::string& stopwords_path) {
  qir::corpus::IngestConfig config;
  config.min_df = min_df;
  if (!stopwords_path.empty()) {
    std::ifstream in(stopwords_path);
    if (!in) throw qir::Error(qir::ErrorKind::malformed_input, "cannot open " + stopwords_path);
    config.stopwords.clear();
    for (std::string word; in >> word;) config.stopwords.insert(word);
  }
  const auto raw = qir::index::read_corpus_jsonl(std::filesystem::path(input));
  const auto corpus = qir::corpus::ingest(raw, config);
  qir::index::write_index(output, corpus, min_df);
  std::cout << qir::index::report_to_json(corpus.report()).dump(2) << '\n';
  return 0;
}

int run_replay(const std::string& index_path, const std::string& input, const std::string& output,
               const std::string& state_output, const SessionFlags& flags, std::size_t top_n,
               bool compare) {
  qir::replay::ReplayOptions options{flags.config(), top_n, compare};
  auto corpus = std::make_shared<const qir::corpus::Corpus>(qir::index::read_index(index_path));
  const qir::session::Engine engine(corpus);
  const auto events = qir::replay::read_session_log(std::filesystem::path(input));

  const auto result = qir::replay::replay(engine, events, options);

  std::ofstream out(output, std::ios::binary | std::ios::trunc);
  if (!out) throw qir::Error(qir::ErrorKind::malformed_input, "cannot write " + output);
  out << qir::replay::dump_log(result.enriched);

  if (!state_output.empty()) {
    const auto& rho = result.final_state.rho;
    const nlohmann::json state{{"dim", rho.dim()},
                               {"ensemble_rank", rho.size()},
                               {"dense", qir::index::dense_to_json(qir::qprob::to_dense(rho))}};
    std::ofstream so(state_output, std::ios::binary | std::ios::trunc);
    if (!so) throw qir::Error(qir::ErrorKind::malformed_input, "cannot write " + state_output);
    so << state.dump() << '\n';
  }

  nlohmann::json summary{{"events", events.size()},
                         {"ranking", qir::replay::ranking_to_json(result.final_ranking)}};
  if (result.compare) summary["compare"] = *result.compare;
  std::cout << summary.dump(2) << '\n';
  return 0;
}

qir::service::Service* g_service = nullptr;

extern "C" void on_signal(int) {
  if (g_service != nullptr) g_service->stop();
}

int run_serve(const std::string& index_path, const std::string& listen, const SessionFlags& flags,
              std::size_t max_dense_dim, const std::string& journal_dir, int idle_timeout) {
  qir::service::ServiceConfig config;
  config.defaults = flags.config();
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    throw qir::Error(qir::ErrorKind::parameter, "--listen expects host:port");
  }
  config.host = listen.substr(0, colon);
  config.port = std::stoi(listen.substr(colon + 1));
  if (config.port <= 0 || config.port > 65535) {
    throw qir::Error(qir::ErrorKind::parameter, "port out of range");
  }
  config.max_dense_dim = max_dense_dim;
  if (!journal_dir.empty()) config.journal_dir = journal_dir;
  config.idle_timeout = std::chrono::seconds(idle_timeout);

  auto corpus = std::make_shared<const qir::corpus::Corpus>(qir::index::read_index(index_path));
  auto engine = std::make_shared<const qir::session::Engine>(corpus);
  qir::service::Service service(engine, config);
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  std::cerr << "qir: serving " << corpus->documents().size() << " documents on " << listen << '\n';
  const bool ok = service.listen();
  g_service = nullptr;
  if (!ok) {
    std::cerr << "qir: could not listen on " << listen << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive retrieval over a quantum-probability model of the information need"};
  app.require_subcommand(1);

  auto* index_cmd = app.add_subcommand("index", "Build a qir-index-v1 file from a JSONL corpus");
  std::string input;
  std::string output;
  std::size_t min_df = 1;
  std::string stopwords;
  index_cmd->add_option("--input", input, "corpus JSON Lines")->required();
  index_cmd->add_option("--output", output, "index file to write")->required();
  index_cmd->add_option("--min-df", min_df, "minimum document frequency")->capture_default_str();
  index_cmd->add_option("--stopwords", stopwords, "whitespace-separated stopword file");

  auto* replay_cmd = app.add_subcommand("replay", "Replay a session log against an index");
  std::string index_path;
  SessionFlags flags;
  std::size_t top_n = 10;
  bool compare = false;
  replay_cmd->add_option("--index", index_path, "index file (QIR_INDEX overrides)");
  replay_cmd->add_option("--input", input, "session log JSON Lines")->required();
  replay_cmd->add_option("--output", output, "enriched session log to write")->required();
  std::string state_output;
  replay_cmd->add_option("--state-output", state_output,
                         "write the final density operator as dense JSON (dim <= 64)");
  replay_cmd->add_option("--top", top_n, "size of the printed ranking")->capture_default_str();
  replay_cmd->add_flag("--compare", compare, "emit rank trajectories for alpha in {0, configured, 1}");
  flags.attach(*replay_cmd);

  auto* serve_cmd = app.add_subcommand("serve", "Serve sessions over HTTP");
  std::string listen = "127.0.0.1:8080";
  std::size_t max_dense_dim = 64;
  std::string journal_dir;
  int idle_timeout = 0;
  serve_cmd->add_option("--index", index_path, "index file (QIR_INDEX overrides)");
  serve_cmd->add_option("--listen", listen, "host:port")->capture_default_str();
  serve_cmd->add_option("--max-dense-dim", max_dense_dim, "largest dim for dense state dumps")
      ->capture_default_str();
  serve_cmd->add_option("--journal-dir", journal_dir, "append per-session event journals here");
  serve_cmd->add_option("--idle-timeout", idle_timeout, "evict sessions idle this many seconds (0: never)")
      ->capture_default_str();
  flags.attach(*serve_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*index_cmd) return run_index(input, output, min_df, stopwords);
    if (*replay_cmd) return run_replay(resolve_index(index_path), input, output, state_output, flags, top_n,
                                          compare);
    if (*serve_cmd) {
      return run_serve(resolve_index(index_path), listen, flags, max_dense_dim, journal_dir,
                       idle_timeout);
    }
  } catch (const qir::Error& e) {
    std::cerr << "qir: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "qir: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
