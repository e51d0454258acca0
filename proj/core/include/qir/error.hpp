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

#include <stdexcept>
#include <string>
#include <string_view>

namespace qir {

enum class ErrorKind {
  normalization,
  dimension,
  degenerate_superposition,
  impossible_measurement,
  parameter,
  size,
  ingestion,
  empty_vector,
  empty_document,
  unanchorable_query,
  unknown_document,
  malformed_input,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so that frontends
/// (CLI exit codes, HTTP status mapping) can dispatch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when conditioning on an event the current state assigns
/// (numerically) zero probability.
class ImpossibleMeasurement : public Error {
 public:
  ImpossibleMeasurement(double probability, const std::string& what)
      : Error(ErrorKind::impossible_measurement, what),
        probability_(probability) {}

  double probability() const noexcept { return probability_; }

 private:
  double probability_;
};

}  // namespace qir
