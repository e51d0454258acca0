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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qir/qprob.hpp"

namespace qir::corpus {

/// Sparse vector over vocabulary indices, sorted by index.
template <typename T>
using SparseVector = std::vector<std::pair<std::size_t, T>>;

struct RawDocument {
  std::string doc_id;
  std::string title;
  std::vector<std::string> paragraphs;
};

const std::set<std::string>& default_stopwords();

struct IngestConfig {
  std::set<std::string> stopwords = default_stopwords();
  std::size_t min_df = 1;
};

/// Lowercased ASCII-alphanumeric tokens with stopwords removed. Bytes >= 0x80
/// are kept inside tokens so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text, const std::set<std::string>& stopwords);

struct Paragraph {
  std::string para_id;
  std::string text;
  SparseVector<std::size_t> term_counts;  // in-vocabulary terms only
  SparseVector<double> weights;           // unit-norm tf-idf; empty when unusable

  bool usable() const noexcept { return !weights.empty(); }
  bool contains(std::size_t term) const noexcept;
};

struct Document {
  std::string doc_id;
  std::string title;
  std::vector<Paragraph> paragraphs;

  std::size_t usable_paragraphs() const noexcept;
};

struct IngestReport {
  std::size_t documents = 0;
  std::size_t paragraphs = 0;
  std::vector<std::string> excluded_paragraphs;
  std::size_t vocabulary_size = 0;
};

/// Documents projected onto a term space. Immutable once built.
class Corpus {
 public:
  Corpus(std::vector<Document> documents, std::vector<std::string> vocabulary,
         std::vector<double> idf, IngestReport report);

  std::size_t dim() const noexcept { return vocabulary_.size(); }
  const std::vector<Document>& documents() const noexcept { return documents_; }
  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  std::span<const double> idf() const noexcept { return idf_; }
  const IngestReport& report() const noexcept { return report_; }

  std::optional<std::size_t> term_index(std::string_view term) const;
  const Document* find(std::string_view doc_id) const;
  std::optional<std::size_t> document_index(std::string_view doc_id) const;
  std::size_t usable_paragraphs() const noexcept;

  /// Tokenizes with the stopword list the corpus was ingested with.
  std::vector<std::string> tokenize(std::string_view text) const;
  const std::set<std::string>& stopwords() const noexcept { return stopwords_; }
  void set_stopwords(std::set<std::string> stopwords) { stopwords_ = std::move(stopwords); }

 private:
  std::vector<Document> documents_;
  std::vector<std::string> vocabulary_;
  std::vector<double> idf_;
  IngestReport report_;
  std::unordered_map<std::string, std::size_t> term_lookup_;
  std::unordered_map<std::string, std::size_t> doc_lookup_;
  std::set<std::string> stopwords_ = default_stopwords();
};

/// idf = ln(1 + N / df)
double idf_weight(std::size_t num_documents, std::size_t document_frequency);

Corpus ingest(const std::vector<RawDocument>& raw, const IngestConfig& config = {});

qprob::StateVector paragraph_vector(const Paragraph& p, const Corpus& c);

/// Span of the document's paragraph directions.
qprob::Subspace document_observable(const Document& d, const Corpus& c,
                                    const qprob::Tolerances& tol = {});

/// Cosine between the query tf-idf vector and each document's mean paragraph
/// vector. Only documents with positive similarity are returned; ties go to
/// the smaller doc_id.
std::vector<std::string> baseline_rank(std::span<const std::string> query_terms, const Corpus& c,
                                       std::size_t k);

/// Join of the observables of the top-k baseline documents.
qprob::Subspace query_observable_prf(std::span<const std::string> query_terms, const Corpus& c,
                                     std::size_t k, const qprob::Tolerances& tol = {});

/// Span of every paragraph containing at least one query term.
qprob::Subspace query_observable_terms(std::span<const std::string> query_terms, const Corpus& c,
                                       const qprob::Tolerances& tol = {});

/// Per-document prior used to weight rho_0; absent documents get 1.
using DocumentPriors = std::map<std::string, double, std::less<>>;

/// Mixture over all usable paragraph vectors. Without priors every paragraph
/// weighs the same; with priors a paragraph weighs its document's prior.
qprob::Ensemble initial_density(const Corpus& c, const DocumentPriors& priors = {});

}  // namespace qir::corpus
