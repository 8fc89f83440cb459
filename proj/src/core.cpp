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

#include "core.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace simuldec {

namespace {

constexpr const char* kStartSurface = "<s>";
constexpr const char* kEndSurface = "</s>";

bool has_whitespace(const std::string& s) {
  for (unsigned char c : s) {
    if (std::isspace(c)) return true;
  }
  return false;
}

}  // namespace

Token::Token(std::string surface) : surface_(std::move(surface)) {
  if (surface_.empty()) throw ArgumentError("token surface must be non-empty");
  if (has_whitespace(surface_)) {
    throw ArgumentError("token surface must not contain whitespace: '" + surface_ + "'");
  }
}

bool Token::is_end_marker() const { return surface_ == kEndSurface; }
bool Token::is_start_marker() const { return surface_ == kStartSurface; }

const Token& Token::start_marker() {
  static const Token token{kStartSurface};
  return token;
}

const Token& Token::end_marker() {
  static const Token token{kEndSurface};
  return token;
}

Sentence::Sentence(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].is_end_marker() && i + 1 != tokens_.size()) {
      throw ArgumentError("end marker may only appear in final position");
    }
  }
}

Sentence Sentence::from_line(const std::string& line) {
  std::vector<Token> tokens;
  std::istringstream in(line);
  std::string word;
  while (in >> word) tokens.emplace_back(word);
  return Sentence(std::move(tokens));
}

void Sentence::push_back(Token token) {
  if (!tokens_.empty() && tokens_.back().is_end_marker()) {
    throw ArgumentError("cannot append past an end marker");
  }
  tokens_.push_back(std::move(token));
}

bool Sentence::ends_with_marker() const {
  return !tokens_.empty() && tokens_.back().is_end_marker();
}

size_t Sentence::unmarked_size() const {
  return tokens_.size() - (ends_with_marker() ? 1 : 0);
}

Sentence Sentence::without_marker() const {
  if (!ends_with_marker()) return *this;
  return Sentence(std::vector<Token>(tokens_.begin(), tokens_.end() - 1));
}

Sentence Sentence::prefix(size_t n) const {
  if (n >= tokens_.size()) return *this;
  return Sentence(std::vector<Token>(tokens_.begin(), tokens_.begin() + n));
}

std::string Sentence::joined() const {
  std::string out;
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens_[i].str();
  }
  return out;
}

Distribution::Distribution(std::map<Token, double> probs) : probs_(std::move(probs)) {
  if (auto violation = check(probs_)) throw ArgumentError(*violation);
}

double Distribution::prob(const Token& token) const {
  auto it = probs_.find(token);
  return it == probs_.end() ? 0.0 : it->second;
}

std::pair<Token, double> Distribution::argmax() const {
  if (probs_.empty()) throw ArgumentError("argmax of empty distribution");
  auto best = probs_.begin();
  for (auto it = std::next(probs_.begin()); it != probs_.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return {best->first, best->second};
}

std::optional<std::string> Distribution::check(const std::map<Token, double>& probs) {
  if (probs.empty()) return "distribution has no entries";
  double sum = 0.0;
  for (const auto& [token, p] : probs) {
    if (p < 0.0 || !std::isfinite(p)) {
      return "probability of '" + token.str() + "' is " + std::to_string(p);
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kSumTolerance) {
    return "probabilities sum to " + std::to_string(sum) + ", expected 1";
  }
  return std::nullopt;
}

ActionTrace::ActionTrace(std::vector<Action> actions) : actions_(std::move(actions)) {
  for (Action a : actions_) {
    (a == Action::kRead ? reads_ : writes_)++;
  }
}

void ActionTrace::push_back(Action action) {
  actions_.push_back(action);
  (action == Action::kRead ? reads_ : writes_)++;
}

size_t ActionTrace::reads_before_write(size_t t) const {
  if (t == 0 || t > writes_) {
    throw ArgumentError("write index " + std::to_string(t) + " out of range (trace has " +
                        std::to_string(writes_) + " writes)");
  }
  size_t reads = 0;
  size_t writes = 0;
  for (Action a : actions_) {
    if (a == Action::kRead) {
      ++reads;
    } else if (++writes == t) {
      return reads;
    }
  }
  return reads;  // unreachable; t validated above
}

long long ActionTrace::final_lag() const {
  return static_cast<long long>(reads_) - static_cast<long long>(writes_);
}

std::string ActionTrace::to_string() const {
  std::string out;
  for (size_t i = 0; i < actions_.size(); ++i) {
    if (i > 0) out += ' ';
    out += actions_[i] == Action::kRead ? 'R' : 'W';
  }
  return out;
}

ActionTrace ActionTrace::parse(const std::string& text) {
  ActionTrace trace;
  for (unsigned char c : text) {
    if (c == 'R') {
      trace.push_back(Action::kRead);
    } else if (c == 'W') {
      trace.push_back(Action::kWrite);
    } else if (!std::isspace(c)) {
      throw DataError(std::string("unexpected character '") + static_cast<char>(c) +
                      "' in action trace");
    }
  }
  return trace;
}

std::optional<std::string> validate_trace(const ActionTrace& trace) {
  size_t previous = 0;
  for (size_t t = 1; t <= trace.write_count(); ++t) {
    size_t g = trace.reads_before_write(t);
    if (g < previous) {
      return "policy function decreases at write " + std::to_string(t);
    }
    previous = g;
  }
  return std::nullopt;
}

std::optional<std::string> validate_outcome(const DecodeOutcome& outcome) {
  const size_t writes = outcome.trace.write_count();
  if (outcome.hypothesis.size() != writes) {
    return "hypothesis has " + std::to_string(outcome.hypothesis.size()) + " tokens but trace has " +
           std::to_string(writes) + " writes";
  }
  if (outcome.confidences.size() != writes) {
    return "expected one confidence per write";
  }
  if (outcome.elapsed_per_write.size() != writes) {
    return "expected one duration per write";
  }
  if (auto violation = validate_trace(outcome.trace)) return violation;
  return std::nullopt;
}

}  // namespace simuldec
