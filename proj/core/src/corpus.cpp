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

#include "qir/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "qir/error.hpp"

namespace qir::corpus {

using qprob::Amplitudes;
using qprob::StateVector;
using qprob::Subspace;

namespace {

bool is_word_byte(unsigned char ch) {
  return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
         ch >= 0x80;
}

SparseVector<double> tfidf(const SparseVector<std::size_t>& counts, std::span<const double> idf) {
  SparseVector<double> out;
  out.reserve(counts.size());
  double norm = 0.0;
  for (const auto& [term, count] : counts) {
    const double w = static_cast<double>(count) * idf[term];
    out.emplace_back(term, w);
    norm += w * w;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) return {};
  for (auto& entry : out) entry.second /= norm;
  return out;
}

// Mean of the document's unit paragraph vectors.
std::map<std::size_t, double> centroid(const Document& d) {
  std::map<std::size_t, double> sum;
  const std::size_t n = d.usable_paragraphs();
  if (n == 0) return sum;
  for (const auto& p : d.paragraphs) {
    for (const auto& [term, w] : p.weights) sum[term] += w / static_cast<double>(n);
  }
  return sum;
}

std::vector<std::size_t> known_terms(std::span<const std::string> query_terms, const Corpus& c) {
  std::vector<std::size_t> out;
  for (const auto& t : query_terms) {
    if (auto idx = c.term_index(t)) out.push_back(*idx);
  }
  return out;
}

}  // namespace

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      "a",     "about", "above", "after", "again", "against", "all",   "am",    "an",
      "and",   "any",   "are",   "as",    "at",    "be",      "been",  "before", "being",
      "below", "between", "both", "but",  "by",    "can",     "could", "did",   "do",
      "does",  "doing", "down",  "during", "each", "few",     "for",   "from",  "further",
      "had",   "has",   "have",  "having", "he",   "her",     "here",  "hers",  "him",
      "his",   "how",   "i",     "if",    "in",    "into",    "is",    "it",    "its",
      "itself", "just", "me",    "more",  "most",  "my",      "no",    "nor",   "not",
      "now",   "of",    "off",   "on",    "once",  "only",    "or",    "other", "our",
      "ours",  "out",   "over",  "own",   "same",  "she",     "should", "so",   "some",
      "such",  "than",  "that",  "the",   "their", "theirs",  "them",  "then",  "there",
      "these", "they",  "this",  "those", "through", "to",    "too",   "under", "until",
      "up",    "very",  "was",   "we",    "were",  "what",    "when",  "where", "which",
      "while", "who",   "whom",  "why",   "will",  "with",    "would", "you",   "your",
      "yours"};
  return words;
}

std::vector<std::string> tokenize(std::string_view text, const std::set<std::string>& stopwords) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !stopwords.contains(current)) tokens.push_back(current);
    current.clear();
  };
  for (const char raw : text) {
    const auto ch = static_cast<unsigned char>(raw);
    if (is_word_byte(ch)) {
      current.push_back(ch < 0x80 ? static_cast<char>(std::tolower(ch)) : raw);
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

bool Paragraph::contains(std::size_t term) const noexcept {
  return std::binary_search(term_counts.begin(), term_counts.end(),
                            std::pair<std::size_t, std::size_t>{term, 0},
                            [](const auto& a, const auto& b) { return a.first < b.first; });
}

std::size_t Document::usable_paragraphs() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(paragraphs.begin(), paragraphs.end(), [](const auto& p) { return p.usable(); }));
}

Corpus::Corpus(std::vector<Document> documents, std::vector<std::string> vocabulary,
               std::vector<double> idf, IngestReport report)
    : documents_(std::move(documents)),
      vocabulary_(std::move(vocabulary)),
      idf_(std::move(idf)),
      report_(std::move(report)) {
  if (idf_.size() != vocabulary_.size()) {
    throw Error(ErrorKind::dimension, "idf table does not match the vocabulary");
  }
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!term_lookup_.emplace(vocabulary_[i], i).second) {
      throw Error(ErrorKind::ingestion, "duplicate vocabulary term '" + vocabulary_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (!doc_lookup_.emplace(documents_[i].doc_id, i).second) {
      throw Error(ErrorKind::ingestion, "duplicate doc_id '" + documents_[i].doc_id + "'");
    }
  }
}

std::optional<std::size_t> Corpus::term_index(std::string_view term) const {
  auto it = term_lookup_.find(std::string(term));
  if (it == term_lookup_.end()) return std::nullopt;
  return it->second;
}

const Document* Corpus::find(std::string_view doc_id) const {
  auto idx = document_index(doc_id);
  return idx ? &documents_[*idx] : nullptr;
}

std::optional<std::size_t> Corpus::document_index(std::string_view doc_id) const {
  auto it = doc_lookup_.find(std::string(doc_id));
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::usable_paragraphs() const noexcept {
  std::size_t n = 0;
  for (const auto& d : documents_) n += d.usable_paragraphs();
  return n;
}

std::vector<std::string> Corpus::tokenize(std::string_view text) const {
  return corpus::tokenize(text, stopwords_);
}

double idf_weight(std::size_t num_documents, std::size_t document_frequency) {
  return std::log(1.0 + static_cast<double>(num_documents) /
                            static_cast<double>(document_frequency));
}

Corpus ingest(const std::vector<RawDocument>& raw, const IngestConfig& config) {
  if (raw.empty()) throw Error(ErrorKind::ingestion, "no documents to ingest");

  // Tokenize once; document frequency counts each term at most once per doc.
  std::vector<std::vector<std::vector<std::string>>> tokens(raw.size());
  std::map<std::string, std::size_t> df;
  for (std::size_t d = 0; d < raw.size(); ++d) {
    std::set<std::string> seen;
    for (const auto& text : raw[d].paragraphs) {
      tokens[d].push_back(tokenize(text, config.stopwords));
      seen.insert(tokens[d].back().begin(), tokens[d].back().end());
    }
    for (const auto& t : seen) ++df[t];
  }

  std::vector<std::string> vocabulary;
  std::vector<double> idf;
  for (const auto& [term, count] : df) {  // std::map: lexicographic order
    if (count < config.min_df) continue;
    vocabulary.push_back(term);
    idf.push_back(idf_weight(raw.size(), count));
  }
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vocabulary.size(); ++i) index.emplace(vocabulary[i], i);

  IngestReport report;
  report.documents = raw.size();
  report.vocabulary_size = vocabulary.size();

  std::vector<Document> documents;
  documents.reserve(raw.size());
  for (std::size_t d = 0; d < raw.size(); ++d) {
    Document doc{raw[d].doc_id, raw[d].title, {}};
    for (std::size_t p = 0; p < raw[d].paragraphs.size(); ++p) {
      Paragraph para;
      para.para_id = raw[d].doc_id + "#" + std::to_string(p);
      para.text = raw[d].paragraphs[p];
      std::map<std::size_t, std::size_t> counts;
      for (const auto& t : tokens[d][p]) {
        if (auto it = index.find(t); it != index.end()) ++counts[it->second];
      }
      para.term_counts.assign(counts.begin(), counts.end());
      para.weights = tfidf(para.term_counts, idf);
      if (!para.usable()) report.excluded_paragraphs.push_back(para.para_id);
      doc.paragraphs.push_back(std::move(para));
    }
    report.paragraphs += doc.paragraphs.size();
    documents.push_back(std::move(doc));
  }

  if (vocabulary.empty() || report.excluded_paragraphs.size() == report.paragraphs) {
    throw Error(ErrorKind::ingestion,
                "corpus is empty after filtering (" + std::to_string(report.paragraphs) +
                    " paragraphs, " + std::to_string(report.excluded_paragraphs.size()) +
                    " excluded, vocabulary size " + std::to_string(vocabulary.size()) + ")");
  }

  Corpus corpus(std::move(documents), std::move(vocabulary), std::move(idf), std::move(report));
  corpus.set_stopwords(config.stopwords);
  return corpus;
}

StateVector paragraph_vector(const Paragraph& p, const Corpus& c) {
  if (!p.usable()) {
    throw Error(ErrorKind::empty_vector, "paragraph " + p.para_id + " has no vocabulary terms");
  }
  Amplitudes a(c.dim());
  for (const auto& [term, w] : p.weights) a.at(term) = w;
  return StateVector::normalized(std::move(a));
}

Subspace document_observable(const Document& d, const Corpus& c, const qprob::Tolerances& tol) {
  std::vector<StateVector> vectors;
  for (const auto& p : d.paragraphs) {
    if (p.usable()) vectors.push_back(paragraph_vector(p, c));
  }
  if (vectors.empty()) {
    throw Error(ErrorKind::empty_document, "document " + d.doc_id + " has no usable paragraph");
  }
  return qprob::span_of(vectors, tol);
}

std::vector<std::string> baseline_rank(std::span<const std::string> query_terms, const Corpus& c,
                                       std::size_t k) {
  if (k == 0) throw Error(ErrorKind::parameter, "baseline_rank needs k >= 1");

  std::map<std::size_t, double> query;
  for (std::size_t term : known_terms(query_terms, c)) query[term] += c.idf()[term];
  if (query.empty()) return {};
  double query_norm = 0.0;
  for (const auto& [term, w] : query) query_norm += w * w;
  query_norm = std::sqrt(query_norm);

  std::vector<std::pair<double, const std::string*>> scored;
  for (const auto& d : c.documents()) {
    const auto mean = centroid(d);
    double dot = 0.0;
    double norm = 0.0;
    for (const auto& [term, w] : mean) {
      norm += w * w;
      if (auto it = query.find(term); it != query.end()) dot += w * it->second;
    }
    if (dot <= 0.0 || norm == 0.0) continue;
    scored.emplace_back(dot / (query_norm * std::sqrt(norm)), &d.doc_id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return *a.second < *b.second;
  });

  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(*scored[i].second);
  return out;
}

Subspace query_observable_prf(std::span<const std::string> query_terms, const Corpus& c,
                              std::size_t k, const qprob::Tolerances& tol) {
  const auto top = baseline_rank(query_terms, c, k);
  if (top.empty()) {
    throw Error(ErrorKind::unanchorable_query, "no document matches the query terms");
  }
  Subspace joined = Subspace::zero(c.dim());
  for (const auto& id : top) joined = qprob::join(joined, document_observable(*c.find(id), c, tol), tol);
  return joined;
}

Subspace query_observable_terms(std::span<const std::string> query_terms, const Corpus& c,
                                const qprob::Tolerances& tol) {
  const auto terms = known_terms(query_terms, c);
  if (terms.empty()) {
    throw Error(ErrorKind::unanchorable_query, "no query term is in the vocabulary");
  }
  std::vector<StateVector> vectors;
  for (const auto& d : c.documents()) {
    for (const auto& p : d.paragraphs) {
      if (!p.usable()) continue;
      if (std::any_of(terms.begin(), terms.end(), [&](std::size_t t) { return p.contains(t); })) {
        vectors.push_back(paragraph_vector(p, c));
      }
    }
  }
  return qprob::span_of(vectors, tol);
}

qprob::Ensemble initial_density(const Corpus& c, const DocumentPriors& priors) {
  std::vector<qprob::Component> components;
  double total = 0.0;
  for (const auto& d : c.documents()) {
    double prior = 1.0;
    if (auto it = priors.find(d.doc_id); it != priors.end()) prior = it->second;
    if (!(prior >= 0.0) || !std::isfinite(prior)) {
      throw Error(ErrorKind::parameter, "prior for " + d.doc_id + " must be finite and >= 0");
    }
    if (prior == 0.0) continue;
    for (const auto& p : d.paragraphs) {
      if (!p.usable()) continue;
      components.push_back({prior, paragraph_vector(p, c)});
      total += prior;
    }
  }
  if (components.empty()) throw Error(ErrorKind::ingestion, "corpus has no usable paragraph");
  for (auto& comp : components) comp.weight /= total;
  return qprob::Ensemble::from_components(c.dim(), std::move(components));
}

}  // namespace qir::corpus
