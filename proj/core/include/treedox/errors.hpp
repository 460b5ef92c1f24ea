// Copyright 2026 The TreeDOX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exception types. Invalid arguments use std::invalid_argument; the classes
// below cover file access, malformed input files and numerical failure.

#ifndef TREEDOX_ERRORS_HPP_
#define TREEDOX_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace treedox {

// A file could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A text input file is malformed. line() is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Input parsed but its content is unusable (e.g. an interior missing value).
class DataError : public ParseError {
 public:
  using ParseError::ParseError;
};

// Divergence, step-size underflow, or an estimator that found no answer.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace treedox

#endif  // TREEDOX_ERRORS_HPP_
