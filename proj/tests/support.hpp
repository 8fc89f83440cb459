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

// Shared test helpers: fixture files, deterministic random scorers, and the
// independent brute-force BLEU oracle.

#ifndef SIMULDEC_TESTS_SUPPORT_HPP
#define SIMULDEC_TESTS_SUPPORT_HPP

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "core.hpp"
#include "scorers.hpp"

namespace simuldec::test {

inline Token tok(const std::string& surface) { return Token(surface); }

inline Sentence sent(const std::string& words) { return Sentence::from_line(words); }

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    auto base = std::filesystem::temp_directory_path();
    path_ = base / ("simuldec_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// A scorer whose table is random but fixed: the first lookup of a prefix
// pair draws a distribution from the instance's RNG and memoizes it, so
// identical prefixes always yield identical results. Every probability is
// strictly below one.
class LazyRandomScorer final : public Scorer {
 public:
  LazyRandomScorer(VocabularyPtr vocab, uint64_t seed) : vocab_(std::move(vocab)), rng_(seed) {}

  Distribution score(const Sentence& source_prefix, const Sentence& target_prefix) const override {
    const std::string key = source_prefix.joined() + '\t' + target_prefix.joined();
    auto it = table_.find(key);
    if (it == table_.end()) {
      it = table_.emplace(key, draw()).first;
    }
    return it->second;
  }

  const Vocabulary& vocab() const override { return *vocab_; }

 private:
  Distribution draw() const {
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    std::map<Token, double> probs;
    double sum = 0.0;
    for (const Token& token : vocab_->tokens()) {
      const double w = weight(rng_);
      probs.emplace(token, w);
      sum += w;
    }
    for (auto& [token, p] : probs) p /= sum;
    return Distribution(std::move(probs));
  }

  VocabularyPtr vocab_;
  mutable std::mt19937_64 rng_;
  mutable std::unordered_map<std::string, Distribution> table_;
};

// Short random source sentence over a small closed token set.
inline Sentence numbered_random(std::mt19937_64& rng) {
  std::uniform_int_distribution<size_t> len(1, 5);
  Sentence s;
  const size_t n = len(rng);
  for (size_t i = 0; i < n; ++i) s.push_back(Token("n" + std::to_string(rng() % 20)));
  return s;
}

// Always returns the same distribution, whatever the prefixes.
class ConstScorer final : public Scorer {
 public:
  explicit ConstScorer(Distribution distribution) : distribution_(std::move(distribution)) {
    std::vector<Token> tokens;
    for (const auto& [token, p] : distribution_.probs()) tokens.push_back(token);
    vocab_ = std::make_shared<Vocabulary>(std::move(tokens));
  }

  Distribution score(const Sentence&, const Sentence&) const override { return distribution_; }
  const Vocabulary& vocab() const override { return *vocab_; }

 private:
  Distribution distribution_;
  VocabularyPtr vocab_;
};

inline ScriptedScorer::Entry entry(const std::string& src, const std::string& tgt,
                                   std::initializer_list<std::pair<const char*, double>> probs) {
  std::map<Token, double> map;
  for (const auto& [surface, p] : probs) map.emplace(Token(surface), p);
  return ScriptedScorer::Entry{sent(src), sent(tgt), Distribution(std::move(map))};
}

// Wraps a scorer and records the (source minus target) length difference of
// every call plus whether the source prefix already carried the end marker.
class RecordingScorer final : public Scorer {
 public:
  struct Call {
    long long lag;
    bool source_has_marker;
  };

  RecordingScorer(ScorerPtr base, std::vector<Call>* log) : base_(std::move(base)), log_(log) {}

  Distribution score(const Sentence& source_prefix, const Sentence& target_prefix) const override {
    log_->push_back(Call{static_cast<long long>(source_prefix.size()) -
                             static_cast<long long>(target_prefix.size()),
                         source_prefix.ends_with_marker()});
    return base_->score(source_prefix, target_prefix);
  }

  const Vocabulary& vocab() const override { return base_->vocab(); }

 private:
  ScorerPtr base_;
  std::vector<Call>* log_;
};

// ---------------------------------------------------------------------------
// Independent BLEU oracle: nested index loops and direct token comparisons,
// no hash tables, sharing nothing with the library implementation.

inline bool same_ngram(const std::vector<Token>& a, size_t ai, const std::vector<Token>& b,
                       size_t bi, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (!(a[ai + i] == b[bi + i])) return false;
  }
  return true;
}

inline double brute_force_corpus_bleu(const std::vector<Sentence>& hypotheses,
                                      const std::vector<std::vector<Sentence>>& reference_sets) {
  size_t matched[4] = {0, 0, 0, 0};
  size_t total[4] = {0, 0, 0, 0};
  size_t hyp_len = 0;
  size_t ref_len = 0;

  for (size_t s = 0; s < hypotheses.size(); ++s) {
    const std::vector<Token>& hyp = hypotheses[s].tokens();
    const std::vector<std::vector<Token>>* refs = nullptr;
    std::vector<std::vector<Token>> ref_tokens;
    for (const Sentence& ref : reference_sets[s]) ref_tokens.push_back(ref.tokens());
    refs = &ref_tokens;

    hyp_len += hyp.size();
    size_t closest = ref_tokens.front().size();
    for (const auto& ref : ref_tokens) {
      const auto dist = [&](size_t len) {
        return len > hyp.size() ? len - hyp.size() : hyp.size() - len;
      };
      if (dist(ref.size()) < dist(closest) || (dist(ref.size()) == dist(closest) && ref.size() < closest)) {
        closest = ref.size();
      }
    }
    ref_len += closest;

    for (size_t n = 1; n <= 4; ++n) {
      if (hyp.size() < n) continue;
      total[n - 1] += hyp.size() - n + 1;
      for (size_t p = 0; p + n <= hyp.size(); ++p) {
        bool first = true;
        for (size_t q = 0; q < p; ++q) {
          if (same_ngram(hyp, q, hyp, p, n)) {
            first = false;
            break;
          }
        }
        if (!first) continue;
        size_t in_hyp = 0;
        for (size_t q = p; q + n <= hyp.size(); ++q) {
          if (same_ngram(hyp, q, hyp, p, n)) ++in_hyp;
        }
        size_t best_ref = 0;
        for (const auto& ref : ref_tokens) {
          size_t in_ref = 0;
          if (ref.size() >= n) {
            for (size_t q = 0; q + n <= ref.size(); ++q) {
              if (same_ngram(ref, q, hyp, p, n)) ++in_ref;
            }
          }
          if (in_ref > best_ref) best_ref = in_ref;
        }
        matched[n - 1] += in_hyp < best_ref ? in_hyp : best_ref;
      }
    }
  }

  if (hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  for (size_t n = 0; n < 4; ++n) {
    if (total[n] == 0 || matched[n] == 0) return 0.0;
    log_sum += std::log(static_cast<double>(matched[n]) / static_cast<double>(total[n]));
  }
  const double bp = hyp_len >= ref_len
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len));
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

// Random micro-corpus for oracle comparisons: small vocabulary, short
// sentences, 1..3 references per sentence.
struct MicroCorpus {
  std::vector<Sentence> hypotheses;
  std::vector<std::vector<Sentence>> reference_sets;
};

inline MicroCorpus random_micro_corpus(std::mt19937_64& rng) {
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<size_t> corpus_size(1, 5);
  std::uniform_int_distribution<size_t> sentence_len(1, 8);
  std::uniform_int_distribution<size_t> ref_count(1, 3);
  std::uniform_int_distribution<size_t> word(0, vocab.size() - 1);

  auto random_sentence = [&] {
    std::vector<Token> tokens;
    const size_t len = sentence_len(rng);
    for (size_t i = 0; i < len; ++i) tokens.emplace_back(vocab[word(rng)]);
    return Sentence(std::move(tokens));
  };

  MicroCorpus corpus;
  const size_t size = corpus_size(rng);
  for (size_t i = 0; i < size; ++i) {
    corpus.hypotheses.push_back(random_sentence());
    std::vector<Sentence> refs;
    const size_t count = ref_count(rng);
    for (size_t r = 0; r < count; ++r) refs.push_back(random_sentence());
    corpus.reference_sets.push_back(std::move(refs));
  }
  return corpus;
}

}  // namespace simuldec::test

#endif  // SIMULDEC_TESTS_SUPPORT_HPP
