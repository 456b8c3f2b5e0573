// Copyright 2026 The supersage Authors.
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
#include <stdexcept>
#include <string>

namespace supersage {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument values (probabilities out of range, K > n, r outside (0,1), ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Dimension or row-count mismatches.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Indices or values outside their valid domain.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Violated call contract (empty group, stale cache, unknown node id, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A halo row required for aggregation was never delivered.
class AggregationError : public Error {
 public:
  using Error::Error;
};

/// Invalid or contradictory experiment configuration; carries the field name.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error("config field '" + field + "': " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Message addressed to a worker that does not exist.
class RoutingError : public Error {
 public:
  using Error::Error;
};

/// A metric was requested on an empty domain (empty mask, empty log).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Model replicas diverged beyond the synchronous-training tolerance.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// compare_runs was given reports from different experiments.
class ComparabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace supersage
