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

#include "scorers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace simuldec {

namespace {

std::string table_key(const Sentence& source_prefix, const Sentence& target_prefix) {
  return source_prefix.joined() + '\t' + target_prefix.joined();
}

void require_in_vocab(const Sentence& target_prefix, const Vocabulary& vocab) {
  for (const Token& token : target_prefix.tokens()) {
    if (!vocab.contains(token)) {
      throw VocabularyError("target token '" + token.str() + "' not in scorer vocabulary");
    }
  }
}

Distribution uniform_over(const Vocabulary& vocab) {
  std::map<Token, double> probs;
  const double p = 1.0 / static_cast<double>(vocab.size());
  for (const Token& token : vocab.tokens()) probs.emplace(token, p);
  return Distribution(std::move(probs));
}

}  // namespace

Vocabulary::Vocabulary(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
  if (tokens_.empty()) throw ArgumentError("vocabulary must be non-empty");
}

bool Vocabulary::contains(const Token& token) const {
  return std::binary_search(tokens_.begin(), tokens_.end(), token);
}

size_t wait_k_visible(size_t k, size_t t, size_t source_len) {
  if (k == 0 || t == 0 || source_len == 0) {
    throw ArgumentError("wait_k_visible requires positive k, t and source length");
  }
  return std::min(source_len, t + k - 1);
}

ScoreResult force_decode(const Scorer& scorer, size_t k, const Sentence& source,
                         const Sentence& target_prefix) {
  if (k == 0) throw ArgumentError("force_decode requires k >= 1");
  if (source.empty()) throw ArgumentError("force_decode requires a non-empty source");
  const size_t t = target_prefix.size() + 1;
  const Sentence visible = source.prefix(wait_k_visible(k, t, source.size()));
  auto [token, prob] = scorer.score(visible, target_prefix).argmax();
  return ScoreResult{std::move(token), prob};
}

ScriptedScorer::ScriptedScorer(std::vector<Entry> entries) : ScriptedScorer(std::move(entries), {}) {}

ScriptedScorer::ScriptedScorer(std::vector<Entry> entries, const std::vector<Token>& extra_vocab) {
  std::vector<Token> tokens = extra_vocab;
  tokens.push_back(Token::end_marker());
  for (const Entry& entry : entries) {
    for (const auto& [token, p] : entry.distribution.probs()) tokens.push_back(token);
  }
  build(std::move(entries), std::move(tokens));
}

void ScriptedScorer::build(std::vector<Entry> entries, std::vector<Token> tokens) {
  vocab_ = std::make_shared<Vocabulary>(std::move(tokens));
  for (Entry& entry : entries) {
    // Re-expand over the full vocabulary so every stored distribution has
    // the same domain.
    std::map<Token, double> probs;
    for (const Token& token : vocab_->tokens()) probs.emplace(token, 0.0);
    for (const auto& [token, p] : entry.distribution.probs()) probs[token] = p;
    auto key = table_key(entry.source_prefix, entry.target_prefix);
    if (!table_.emplace(std::move(key), Distribution(std::move(probs))).second) {
      throw ArgumentError("duplicate scripted entry for prefixes (" + entry.source_prefix.joined() +
                          ", " + entry.target_prefix.joined() + ")");
    }
  }
  fallback_ = uniform_over(*vocab_);
}

Distribution ScriptedScorer::score(const Sentence& source_prefix,
                                   const Sentence& target_prefix) const {
  require_in_vocab(target_prefix, *vocab_);
  auto it = table_.find(table_key(source_prefix, target_prefix));
  return it == table_.end() ? fallback_ : it->second;
}

DictionaryScorer::DictionaryScorer(std::map<Token, Token> lexicon, double gamma, uint64_t seed,
                                   const std::vector<Token>& extra_vocab)
    : lexicon_(std::move(lexicon)), gamma_(gamma), seed_(seed) {
  if (!(gamma_ > 0.0 && gamma_ < 1.0)) {
    throw ArgumentError("dictionary sharpness gamma must lie in (0,1)");
  }
  std::vector<Token> tokens = extra_vocab;
  tokens.push_back(Token::end_marker());
  for (const auto& [src, tgt] : lexicon_) {
    if (tgt.is_end_marker() || tgt.is_start_marker()) {
      throw ArgumentError("lexicon target may not be a marker: " + src.str());
    }
    tokens.push_back(tgt);
  }
  vocab_ = std::make_shared<Vocabulary>(std::move(tokens));
}

Distribution DictionaryScorer::score(const Sentence& source_prefix,
                                     const Sentence& target_prefix) const {
  require_in_vocab(target_prefix, *vocab_);
  const size_t t = target_prefix.size() + 1;
  const size_t visible = source_prefix.unmarked_size();
  const size_t vocab_size = vocab_->size();
  std::map<Token, double> probs;

  if (t <= visible) {
    const Token& src = source_prefix.at(t - 1);
    auto it = lexicon_.find(src);
    if (it == lexicon_.end()) {
      throw VocabularyError("source token '" + src.str() + "' not in lexicon");
    }
    const double lookahead = static_cast<double>(visible - t + 1);
    const double confidence = 1.0 - std::pow(gamma_, lookahead);
    const double rest = (1.0 - confidence) / static_cast<double>(vocab_size - 1);
    for (const Token& token : vocab_->tokens()) {
      probs.emplace(token, token == it->second ? confidence : rest);
    }
  } else if (source_prefix.ends_with_marker()) {
    if (vocab_size == 1) {
      probs.emplace(Token::end_marker(), 1.0);
    } else {
      const double rest = gamma_ / static_cast<double>(vocab_size - 1);
      for (const Token& token : vocab_->tokens()) {
        probs.emplace(token, token.is_end_marker() ? 1.0 - gamma_ : rest);
      }
    }
  } else {
    return uniform_over(*vocab_);
  }
  return Distribution(std::move(probs));
}

namespace {

// Splits a TSV line, keeping empty fields.
std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

Sentence parse_prefix(const std::string& field, const std::string& path, size_t line_no) {
  if (field == "|") return Sentence{};
  try {
    return Sentence::from_line(field);
  } catch (const Error& e) {
    throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
  }
}

double parse_prob(const std::string& text, const std::string& path, size_t line_no) {
  size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    consumed = 0;
  }
  if (consumed != text.size() || text.empty()) {
    throw DataError(path + ":" + std::to_string(line_no) + ": bad probability '" + text + "'");
  }
  return value;
}

bool skippable(const std::string& line) {
  for (unsigned char c : line) {
    if (c == '#') return true;
    if (!std::isspace(c)) return false;
  }
  return true;  // blank
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  return in;
}

}  // namespace

ScriptedScorer load_scripted(const std::string& path) {
  try {
    return ScriptedScorer(load_scripted_entries(path));
  } catch (const ArgumentError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::vector<ScriptedScorer::Entry> load_scripted_entries(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<ScriptedScorer::Entry> entries;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 3 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    Sentence src = parse_prefix(fields[0], path, line_no);
    Sentence tgt = parse_prefix(fields[1], path, line_no);

    std::map<Token, double> probs;
    std::istringstream pairs(fields[2]);
    std::string pair;
    while (pairs >> pair) {
      size_t colon = pair.rfind(':');
      if (colon == std::string::npos || colon == 0) {
        throw DataError(path + ":" + std::to_string(line_no) + ": expected tok:prob, got '" + pair + "'");
      }
      Token token{pair.substr(0, colon)};
      double prob = parse_prob(pair.substr(colon + 1), path, line_no);
      if (!probs.emplace(std::move(token), prob).second) {
        throw DataError(path + ":" + std::to_string(line_no) + ": duplicate token in distribution");
      }
    }
    if (auto violation = Distribution::check(probs)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + *violation);
    }
    entries.push_back({std::move(src), std::move(tgt), Distribution(std::move(probs))});
  }
  return entries;
}

std::map<Token, Token> load_dictionary(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::map<Token, Token> lexicon;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (skippable(line)) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected src_token<TAB>tgt_token");
    }
    try {
      Token src{fields[0]};
      Token tgt{fields[1]};
      if (!lexicon.emplace(std::move(src), std::move(tgt)).second) {
        throw DataError(path + ":" + std::to_string(line_no) + ": duplicate source token");
      }
    } catch (const ArgumentError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lexicon;
}

}  // namespace simuldec
