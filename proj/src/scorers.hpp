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

#ifndef SIMULDEC_SCORERS_HPP
#define SIMULDEC_SCORERS_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "core.hpp"

namespace simuldec {

// The shared target vocabulary of a scorer bank: a sorted, duplicate-free
// token set. Scorers hold it by shared pointer; equality is by value.
class Vocabulary {
 public:
  explicit Vocabulary(std::vector<Token> tokens);

  bool contains(const Token& token) const;
  size_t size() const { return tokens_.size(); }
  const std::vector<Token>& tokens() const { return tokens_; }

  bool operator==(const Vocabulary& other) const = default;

 private:
  std::vector<Token> tokens_;
};

using VocabularyPtr = std::shared_ptr<const Vocabulary>;

// Incremental next-token scorer. Implementations must be pure with respect
// to their inputs: identical prefixes yield identical distributions, so a
// scorer constructed once may serve any number of concurrent decodes.
// Stochastic implementations take an explicit seed at construction and are
// deterministic from then on.
class Scorer {
 public:
  virtual ~Scorer() = default;

  // Next-token distribution given the visible source prefix and the target
  // prefix produced so far. The result's domain is vocab(). Throws
  // VocabularyError when a target-prefix token lies outside vocab().
  virtual Distribution score(const Sentence& source_prefix,
                             const Sentence& target_prefix) const = 0;

  virtual const Vocabulary& vocab() const = 0;
};

using ScorerPtr = std::shared_ptr<const Scorer>;

// Argmax token of one scorer call together with its probability.
struct ScoreResult {
  Token top_token;
  double top_prob = 0.0;
};

// Number of source tokens a wait-k policy exposes at target step t:
// min(source_len, t + k - 1). All arguments are 1-based and positive.
size_t wait_k_visible(size_t k, size_t t, size_t source_len);

// Forces `scorer` through `target_prefix` under a wait-k view of `source`
// and returns the next-token argmax with its probability. The scorer sees
// the source prefix of length min(|source|, t + k - 1) where
// t = |target_prefix| + 1. Argmax ties break to the lexicographically
// smallest surface. Throws ArgumentError for k < 1 or an empty source.
ScoreResult force_decode(const Scorer& scorer, size_t k, const Sentence& source,
                         const Sentence& target_prefix);

// Table-driven scorer: exact (source prefix, target prefix) pairs map to
// fixed distributions; anything else falls back to the uniform distribution
// over the vocabulary, keeping the scorer total for property tests.
class ScriptedScorer final : public Scorer {
 public:
  struct Entry {
    Sentence source_prefix;
    Sentence target_prefix;
    Distribution distribution;
  };

  // The vocabulary is the union of all entry distributions' tokens plus the
  // end marker; entries are re-expanded over it with zero-probability fill.
  explicit ScriptedScorer(std::vector<Entry> entries);
  // Same, with extra vocabulary beyond what the entries mention.
  ScriptedScorer(std::vector<Entry> entries, const std::vector<Token>& extra_vocab);

  Distribution score(const Sentence& source_prefix,
                     const Sentence& target_prefix) const override;
  const Vocabulary& vocab() const override { return *vocab_; }

  size_t table_size() const { return table_.size(); }

 private:
  void build(std::vector<Entry> entries, std::vector<Token> tokens);

  VocabularyPtr vocab_;
  std::map<std::string, Distribution> table_;  // keyed "src\ttgt" (joined)
  Distribution fallback_;
};

// Word-for-word synthetic scorer whose confidence in the lexicon-mapped
// token grows with the unconsumed source lookahead:
//
//   c = 1 - gamma^(g - t + 1)
//
// at target step t with g unmarked source tokens visible, the remaining
// mass spread uniformly over the rest of the vocabulary. Once t exceeds the
// visible source and the end marker has been read, the end marker gets
// probability 1 - gamma. With source exhausted but no marker seen, it has
// no evidence at all and returns the uniform distribution.
class DictionaryScorer final : public Scorer {
 public:
  // gamma must lie in (0,1). The seed is recorded for the construction
  // contract; the distributions themselves are closed-form. Lexicon targets
  // may not be markers. The vocabulary is the lexicon's target side plus the
  // end marker, plus `extra_vocab` if given.
  DictionaryScorer(std::map<Token, Token> lexicon, double gamma, uint64_t seed,
                   const std::vector<Token>& extra_vocab = {});

  Distribution score(const Sentence& source_prefix,
                     const Sentence& target_prefix) const override;
  const Vocabulary& vocab() const override { return *vocab_; }

  double gamma() const { return gamma_; }
  uint64_t seed() const { return seed_; }

 private:
  std::map<Token, Token> lexicon_;
  double gamma_;
  uint64_t seed_;
  VocabularyPtr vocab_;
};

// Reads a scripted-scorer table. One entry per line:
//
//   src_prefix<TAB>tgt_prefix<TAB>tok:prob tok:prob ...
//
// Prefixes are space-joined tokens; the empty prefix is written "|".
// Lines starting with '#' and blank lines are ignored. Errors carry the
// offending line number; distributions whose mass is not within 1e-6 of
// one are rejected.
ScriptedScorer load_scripted(const std::string& path);

// The raw entries of a scripted table, for callers that assemble scorers
// over a wider vocabulary than one file mentions.
std::vector<ScriptedScorer::Entry> load_scripted_entries(const std::string& path);

// Reads a lexicon for DictionaryScorer: `src_token<TAB>tgt_token` per line,
// '#' comments and blank lines ignored.
std::map<Token, Token> load_dictionary(const std::string& path);

}  // namespace simuldec

#endif  // SIMULDEC_SCORERS_HPP
