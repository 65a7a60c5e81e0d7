// Copyright 2026 The lttext Authors
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
#include <utility>
#include <vector>

namespace lttext {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidPolygon : public Error {
 public:
  using Error::Error;
};

/// Fewer than three distinct vertices, or zero enclosed area.
class DegeneratePolygon : public InvalidPolygon {
 public:
  using InvalidPolygon::InvalidPolygon;
};

class SelfIntersectingPolygon : public InvalidPolygon {
 public:
  using InvalidPolygon::InvalidPolygon;
};

class NonFiniteCoordinate : public InvalidPolygon {
 public:
  using InvalidPolygon::InvalidPolygon;
};

/// Malformed line-oriented input. `line()` is 1-based; 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Structurally invalid JSON document; `path()` names the offending node,
/// e.g. `dataset.images[0].instances[0].categories[0]`.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class EmptySplit : public Error {
 public:
  using Error::Error;
};

class MissingDiagonal : public Error {
 public:
  using Error::Error;
};

class DuplicateNamespacedId : public Error {
 public:
  using Error::Error;
};

class UndecodableImage : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

enum class Severity { Info, Warning, Error };

inline const char* to_string(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "unknown";
}

/// Non-fatal finding reported alongside a result.
struct Diagnostic {
  Severity severity = Severity::Warning;
  std::string code;      // stable machine-readable tag, e.g. "duplicate_id"
  std::string location;  // image id, JSON path or "file:line"
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Diagnostics = std::vector<Diagnostic>;

namespace detail {

inline void emit(Diagnostics* sink, Severity severity, std::string code, std::string location,
                 std::string message) {
  if (sink != nullptr) {
    sink->push_back({severity, std::move(code), std::move(location), std::move(message)});
  }
}

}  // namespace detail

}  // namespace lttext
