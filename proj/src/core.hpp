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

#ifndef SIMULDEC_CORE_HPP
#define SIMULDEC_CORE_HPP

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace simuldec {

// A single vocabulary item. Surfaces are opaque UTF-8 strings; they must be
// non-empty and contain no ASCII whitespace so sentences round-trip through
// whitespace-tokenized text. Two surfaces are reserved: the sequence start
// marker "<s>" and the end marker "</s>".
class Token {
 public:
  explicit Token(std::string surface);

  const std::string& str() const { return surface_; }
  bool is_end_marker() const;
  bool is_start_marker() const;

  static const Token& start_marker();
  static const Token& end_marker();

  auto operator<=>(const Token& other) const { return surface_ <=> other.surface_; }
  bool operator==(const Token& other) const = default;

 private:
  std::string surface_;
};

// An ordered token sequence. At most one end marker may appear, and only in
// final position; decoders append it when a stream or hypothesis finishes.
class Sentence {
 public:
  Sentence() = default;
  explicit Sentence(std::vector<Token> tokens);

  // Splits `line` on ASCII whitespace. Empty lines give the empty sentence.
  static Sentence from_line(const std::string& line);

  void push_back(Token token);

  const std::vector<Token>& tokens() const { return tokens_; }
  size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const Token& at(size_t i) const { return tokens_.at(i); }

  bool ends_with_marker() const;
  // Token count with the trailing end marker, if any, excluded.
  size_t unmarked_size() const;
  // Copy with the trailing end marker, if any, removed.
  Sentence without_marker() const;
  // First `n` tokens (n is clamped to the sentence length).
  Sentence prefix(size_t n) const;

  // Tokens joined by single spaces.
  std::string joined() const;

  bool operator==(const Sentence& other) const = default;

 private:
  std::vector<Token> tokens_;
};

// A probability vector over a target vocabulary, keyed by token. Keys are
// ordered, so iteration (and therefore argmax tie-breaking) is lexicographic.
class Distribution {
 public:
  Distribution() = default;
  // Throws ArgumentError if any probability is negative or the total mass is
  // not within `kSumTolerance` of one.
  explicit Distribution(std::map<Token, double> probs);

  static constexpr double kSumTolerance = 1e-6;

  const std::map<Token, double>& probs() const { return probs_; }
  double prob(const Token& token) const;
  size_t size() const { return probs_.size(); }

  // Highest-probability entry; ties resolve to the lexicographically
  // smallest surface.
  std::pair<Token, double> argmax() const;

  // Returns a description of the first invariant violation, if any.
  static std::optional<std::string> check(const std::map<Token, double>& probs);

  bool operator==(const Distribution& other) const = default;

 private:
  std::map<Token, double> probs_;
};

enum class Action : unsigned char { kRead, kWrite };

// The ordered READ/WRITE decisions of one decode. The policy function it
// induces (source tokens consumed before each write) is non-decreasing by
// construction.
class ActionTrace {
 public:
  ActionTrace() = default;
  explicit ActionTrace(std::vector<Action> actions);

  void push_back(Action action);

  const std::vector<Action>& actions() const { return actions_; }
  size_t size() const { return actions_.size(); }
  size_t read_count() const { return reads_; }
  size_t write_count() const { return writes_; }

  // Number of READ actions before the t-th WRITE (t is 1-based). Throws
  // ArgumentError when t is out of range. This is the policy function
  // evaluated at target step t.
  size_t reads_before_write(size_t t) const;

  // read_count() - write_count() over the whole trace. Negative values occur
  // only in the tail after the source is exhausted.
  long long final_lag() const;

  // "R W R R W W" form, and its inverse. Parsing accepts any whitespace
  // separation; throws DataError on other characters.
  std::string to_string() const;
  static ActionTrace parse(const std::string& text);

  bool operator==(const ActionTrace& other) const = default;

 private:
  std::vector<Action> actions_;
  size_t reads_ = 0;
  size_t writes_ = 0;
};

// Checks ActionTrace invariants, reporting the first violation. The induced
// policy function cannot decrease for any representable trace, so this
// re-derives it and confirms; it exists as the hook property tests drive.
std::optional<std::string> validate_trace(const ActionTrace& trace);

// Everything one decode produced: hypothesis (end marker included when the
// decoder emitted one), the action trace, and per-WRITE confidence and
// wall-clock timing. `truncated` is set when the length cap stopped the
// decode before an end marker appeared.
struct DecodeOutcome {
  Sentence hypothesis;
  ActionTrace trace;
  std::vector<double> confidences;
  std::vector<double> elapsed_per_write;  // seconds
  bool truncated = false;
};

// Cross-field DecodeOutcome invariants: per-write vectors sized to the
// trace's WRITE count, and hypothesis length equal to it.
std::optional<std::string> validate_outcome(const DecodeOutcome& outcome);

}  // namespace simuldec

#endif  // SIMULDEC_CORE_HPP
