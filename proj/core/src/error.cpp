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

#include "qir/error.hpp"

namespace qir {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::normalization: return "normalization";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::degenerate_superposition: return "degenerate_superposition";
    case ErrorKind::impossible_measurement: return "impossible_measurement";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::size: return "size";
    case ErrorKind::ingestion: return "ingestion";
    case ErrorKind::empty_vector: return "empty_vector";
    case ErrorKind::empty_document: return "empty_document";
    case ErrorKind::unanchorable_query: return "unanchorable_query";
    case ErrorKind::unknown_document: return "unknown_document";
    case ErrorKind::malformed_input: return "malformed_input";
  }
  return "unknown";
}

}  // namespace qir
