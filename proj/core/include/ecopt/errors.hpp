// Copyright 2026 The ecopt Authors. All Rights Reserved.
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
// =============================================================================

#ifndef ECOPT_ERRORS_HPP
#define ECOPT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

#include "ecopt/types.hpp"

namespace ecopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or incompatible options. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Malformed LIBSVM input; carries the 1-based line number.
class ParseError : public ConfigError {
 public:
  ParseError(std::size_t line, std::string reason)
      : ConfigError("line " + std::to_string(line) + ": " + reason),
        line_(line),
        reason_(std::move(reason)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

/// Base of every numerical failure. CLI exit code 3.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class NumericalOverflow : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// A dual variable left the domain of the loss conjugate.
class DomainError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class ConstantEstimationError : public NumericalFailure {
 public:
  ConstantEstimationError(const std::string& what, Vector last_iterate)
      : NumericalFailure(what), last_iterate_(std::move(last_iterate)) {}

  const Vector& last_iterate() const noexcept { return last_iterate_; }

 private:
  Vector last_iterate_;
};

class ReferenceError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class InnerDivergence : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace ecopt

#endif  // ECOPT_ERRORS_HPP
