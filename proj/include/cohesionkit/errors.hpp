/*
 * Copyright 2026 The cohesionkit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cohesionkit {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or invalid input file. Carries the 1-based line number of the
// offending row when known (0 when the problem is file-level).
class LoadError : public Error {
 public:
  LoadError(const std::string& msg, int64_t row = 0)
      : Error(row > 0 ? msg + " (row " + std::to_string(row) + ")" : msg),
        row_(row) {}
  int64_t row() const { return row_; }

 private:
  int64_t row_;
};

// Invalid configuration value (unknown attribute, bad threshold, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Not enough eligible batches to satisfy a sampling request.
class SamplingError : public Error {
 public:
  SamplingError(const std::string& msg, int64_t eligible)
      : Error(msg + " (eligible=" + std::to_string(eligible) + ")"),
        eligible_(eligible) {}
  int64_t eligible() const { return eligible_; }

 private:
  int64_t eligible_;
};

// A (group, perspective) query selected zero raters.
class EmptyGroupError : public Error {
 public:
  using Error::Error;
};

// Metric defined but numerically degenerate (zero expected disagreement).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Not enough data to evaluate a metric at all.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

// Metric undefined for these inputs (e.g. GAI with nonpositive XRR).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

// Too many null trials failed to produce a usable permutation distribution.
class UnstableNullError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cohesionkit
