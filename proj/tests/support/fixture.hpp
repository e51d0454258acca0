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

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "qir/corpus.hpp"
#include "qir/index.hpp"

namespace qir::testing {

inline std::filesystem::path fixture_path(const std::string& name) {
  return std::filesystem::path(QIR_FIXTURE_DIR) / name;
}

// The bundled 30-document corpus: t01..t15 about tigers, l01..l15 about lions.
inline std::shared_ptr<const corpus::Corpus> two_topic() {
  static const auto c = std::make_shared<const corpus::Corpus>(
      corpus::ingest(index::read_corpus_jsonl(fixture_path("two_topic.jsonl"))));
  return c;
}

inline std::shared_ptr<const corpus::Corpus> make_corpus(std::vector<corpus::RawDocument> docs) {
  return std::make_shared<const corpus::Corpus>(corpus::ingest(docs));
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qir-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace qir::testing
