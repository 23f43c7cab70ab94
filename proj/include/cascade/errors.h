// include/cascade/errors.h
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
//
// Copyright 2026 The Cascade Authors.
//
// Exception types shared by the readers and the pipeline stages.

#ifndef CASCADE_ERRORS_H_
#define CASCADE_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cascade {

// Base class for problems with input data (as opposed to usage errors).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A line of an input file does not match the expected grammar.
class ParseError : public DataError {
 public:
  ParseError(const std::string &source, std::size_t line,
             const std::string &what)
      : DataError(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed rows that violate a cross-row constraint (rank gaps,
// interleaved utterances, mismatched corpora).
class StructuralError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace cascade

#endif  // CASCADE_ERRORS_H_
