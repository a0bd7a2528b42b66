// Copyright 2026 The Offspan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OFFSPAN_ERRORS_H_
#define OFFSPAN_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace offspan {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input record. `line` is 1-based; 0 when not file-backed.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class SpanBoundsError : public Error {
 public:
  using Error::Error;
};

// Non-finite parameter found in a checkpoint segment.
class ModelFault : public Error {
 public:
  explicit ModelFault(const std::string& segment)
      : Error("non-finite value in parameter segment '" + segment + "'"),
        segment_(segment) {}
  const std::string& segment() const { return segment_; }

 private:
  std::string segment_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class RankDeficientError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace offspan

#endif  // OFFSPAN_ERRORS_H_
