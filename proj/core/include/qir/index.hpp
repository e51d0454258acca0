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

// Corpus input (JSON Lines) and the persisted "qir-index-v1" index file.

#pragma once

#include <filesystem>
#include <istream>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qir/corpus.hpp"
#include "qir/qprob.hpp"

namespace qir::index {

inline constexpr std::string_view kIndexVersion = "qir-index-v1";

/// One {"doc_id", "title", "paragraphs": [...]} object per line. Blank lines
/// are skipped. Errors name the 1-based line number.
std::vector<corpus::RawDocument> read_corpus_jsonl(std::istream& in);
std::vector<corpus::RawDocument> read_corpus_jsonl(const std::filesystem::path& path);

nlohmann::json report_to_json(const corpus::IngestReport& report);

nlohmann::json to_json(const corpus::Corpus& c, std::size_t min_df);
corpus::Corpus from_json(const nlohmann::json& j);

/// Serialized form is deterministic: identical corpora give identical bytes.
std::string dump_index(const corpus::Corpus& c, std::size_t min_df);
void write_index(const std::filesystem::path& path, const corpus::Corpus& c, std::size_t min_df);
corpus::Corpus read_index(const std::filesystem::path& path);

/// Row-major [[ [re, im], ... ], ...].
nlohmann::json dense_to_json(const qprob::DenseMatrix& m);
qprob::DenseMatrix dense_from_json(const nlohmann::json& j);

}  // namespace qir::index
