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

#include "qir/index.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "qir/error.hpp"

namespace qir::index {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw Error(ErrorKind::malformed_input, "line " + std::to_string(line) + ": " + why);
}

corpus::RawDocument parse_document(const std::string& text, std::size_t line) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    malformed(line, std::string("invalid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) malformed(line, "expected a JSON object");
  if (!j.contains("doc_id") || !j["doc_id"].is_string()) malformed(line, "missing string doc_id");
  if (!j.contains("paragraphs") || !j["paragraphs"].is_array()) {
    malformed(line, "missing paragraphs array");
  }

  corpus::RawDocument doc;
  doc.doc_id = j["doc_id"].get<std::string>();
  if (j.contains("title")) {
    if (!j["title"].is_string()) malformed(line, "title must be a string");
    doc.title = j["title"].get<std::string>();
  }
  for (const auto& p : j["paragraphs"]) {
    if (!p.is_string()) malformed(line, "paragraphs must be strings");
    doc.paragraphs.push_back(p.get<std::string>());
  }
  return doc;
}

template <typename T>
json sparse_to_json(const corpus::SparseVector<T>& v) {
  json out = json::array();
  for (const auto& [idx, value] : v) out.push_back(json::array({idx, value}));
  return out;
}

template <typename T>
corpus::SparseVector<T> sparse_from_json(const json& j, std::size_t dim) {
  corpus::SparseVector<T> out;
  for (const auto& entry : j) {
    const auto idx = entry.at(0).get<std::size_t>();
    if (idx >= dim) throw Error(ErrorKind::malformed_input, "term index out of range in index");
    if (!out.empty() && out.back().first >= idx) {
      throw Error(ErrorKind::malformed_input, "sparse entries must be strictly increasing");
    }
    out.emplace_back(idx, entry.at(1).get<T>());
  }
  return out;
}

}  // namespace

std::vector<corpus::RawDocument> read_corpus_jsonl(std::istream& in) {
  std::vector<corpus::RawDocument> docs;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    docs.push_back(parse_document(text, line));
  }
  return docs;
}

std::vector<corpus::RawDocument> read_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::malformed_input, "cannot open " + path.string());
  return read_corpus_jsonl(in);
}

json report_to_json(const corpus::IngestReport& report) {
  return json{{"documents", report.documents},
              {"paragraphs", report.paragraphs},
              {"excluded_paragraphs", report.excluded_paragraphs.size()},
              {"excluded", report.excluded_paragraphs},
              {"vocabulary_size", report.vocabulary_size}};
}

json to_json(const corpus::Corpus& c, std::size_t min_df) {
  json docs = json::array();
  for (const auto& d : c.documents()) {
    json paragraphs = json::array();
    for (const auto& p : d.paragraphs) {
      paragraphs.push_back(json{{"para_id", p.para_id},
                                {"text", p.text},
                                {"counts", sparse_to_json(p.term_counts)},
                                {"vector", sparse_to_json(p.weights)}});
    }
    docs.push_back(json{{"doc_id", d.doc_id}, {"title", d.title}, {"paragraphs", paragraphs}});
  }
  return json{{"version", kIndexVersion},
              {"min_df", min_df},
              {"stopwords", c.stopwords()},
              {"vocabulary", c.vocabulary()},
              {"idf", c.idf()},
              {"report", report_to_json(c.report())},
              {"documents", docs}};
}

corpus::Corpus from_json(const json& j) {
  try {
    if (j.at("version").get<std::string>() != kIndexVersion) {
      throw Error(ErrorKind::malformed_input,
                  "unsupported index version '" + j.at("version").get<std::string>() + "'");
    }
    auto vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
    auto idf = j.at("idf").get<std::vector<double>>();
    const std::size_t dim = vocabulary.size();

    corpus::IngestReport report;
    report.vocabulary_size = dim;
    std::vector<corpus::Document> documents;
    for (const auto& jd : j.at("documents")) {
      corpus::Document d{jd.at("doc_id").get<std::string>(), jd.at("title").get<std::string>(), {}};
      for (const auto& jp : jd.at("paragraphs")) {
        corpus::Paragraph p;
        p.para_id = jp.at("para_id").get<std::string>();
        p.text = jp.at("text").get<std::string>();
        p.term_counts = sparse_from_json<std::size_t>(jp.at("counts"), dim);
        p.weights = sparse_from_json<double>(jp.at("vector"), dim);
        if (!p.usable()) report.excluded_paragraphs.push_back(p.para_id);
        d.paragraphs.push_back(std::move(p));
      }
      report.paragraphs += d.paragraphs.size();
      documents.push_back(std::move(d));
    }
    report.documents = documents.size();

    corpus::Corpus c(std::move(documents), std::move(vocabulary), std::move(idf), std::move(report));
    c.set_stopwords(j.at("stopwords").get<std::set<std::string>>());
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::malformed_input, std::string("malformed index: ") + e.what());
  }
}

std::string dump_index(const corpus::Corpus& c, std::size_t min_df) {
  return to_json(c, min_df).dump() + "\n";
}

void write_index(const std::filesystem::path& path, const corpus::Corpus& c, std::size_t min_df) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::malformed_input, "cannot write " + path.string());
  out << dump_index(c, min_df);
}

corpus::Corpus read_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::malformed_input, "cannot open index " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::malformed_input, std::string("index is not JSON: ") + e.what());
  }
  return from_json(j);
}

json dense_to_json(const qprob::DenseMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.n; ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.n; ++c) row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

qprob::DenseMatrix dense_from_json(const json& j) {
  qprob::DenseMatrix m{j.size(), qprob::Amplitudes(j.size() * j.size())};
  for (std::size_t r = 0; r < m.n; ++r) {
    if (j[r].size() != m.n) throw Error(ErrorKind::malformed_input, "dense matrix is not square");
    for (std::size_t c = 0; c < m.n; ++c) {
      m(r, c) = {j[r][c].at(0).get<double>(), j[r][c].at(1).get<double>()};
    }
  }
  return m;
}

}  // namespace qir::index
