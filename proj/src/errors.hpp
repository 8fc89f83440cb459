// Copyright 2026 The simuldec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIMULDEC_ERRORS_HPP
#define SIMULDEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace simuldec {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A caller passed an argument violating an operation's precondition.
class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(what) {}
};

// Configuration file problems: unknown keys, missing sections, bad values.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(what) {}
};

// Malformed data files (corpora, scorer tables, report CSVs).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(what) {}
};

// A token fell outside the vocabulary a scorer was built with.
class VocabularyError : public Error {
 public:
  explicit VocabularyError(const std::string& what) : Error(what) {}
};

// Filesystem failures: missing or unwritable paths.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace simuldec

#endif  // SIMULDEC_ERRORS_HPP
