// Copyright 2026 The PSR Engine Authors. All Rights Reserved.
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

#ifndef PSR_ERROR_HPP_
#define PSR_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace psr {

// Every failure the engine reports derives from Error so callers (the CLI in
// particular) can map categories onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent domain data: component index out of range, width mismatch,
// non-positive fps, duplicate events.
class StructuralError : public Error {
 public:
  using Error::Error;
};

// A parameter outside its admissible range.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Frames arriving out of order in a confidence stream.
class StreamError : public Error {
 public:
  using Error::Error;
};

// Two streams that cannot be combined frame by frame.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

// A metric or loss whose definition does not apply to the input (empty
// ground truth, no anchors with positives).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// A state change that no action of the procedure can produce.
class UnknownTransitionError : public Error {
 public:
  using Error::Error;
};

// Malformed input files; carries the offending line when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace psr

#endif  // PSR_ERROR_HPP_
