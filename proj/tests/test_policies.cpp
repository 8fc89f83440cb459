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

#include <doctest.h>

#include <memory>
#include <random>

#include "policies.hpp"
#include "support.hpp"

using namespace simuldec;
using namespace simuldec::test;

namespace {

Sentence numbered_source(size_t n) {
  Sentence s;
  for (size_t i = 1; i <= n; ++i) s.push_back(tok("s" + std::to_string(i)));
  return s;
}

// identity lexicon over the tokens of `source`
ScorerPtr identity_dictionary(const Sentence& source, double gamma = 0.5) {
  std::map<Token, Token> lexicon;
  for (const Token& token : source.tokens()) lexicon.emplace(token, token);
  return std::make_shared<DictionaryScorer>(lexicon, gamma, 0);
}

// The adaptive fixture bank: two scripted models over {A, B, </s>},
// thresholds rho_1 = 0.9, rho_2 = 0.
ModelBank fixture_bank() {
  std::vector<ScriptedScorer::Entry> m1;
  m1.push_back(entry("s1", "", {{"A", 0.95}, {"B", 0.04}, {"</s>", 0.01}}));
  m1.push_back(entry("s1 s2", "A", {{"B", 0.6}, {"A", 0.3}, {"</s>", 0.1}}));
  std::vector<ScriptedScorer::Entry> m2;
  m2.push_back(entry("s1 s2 </s>", "A", {{"B", 0.7}, {"A", 0.2}, {"</s>", 0.1}}));
  m2.push_back(entry("s1 s2 </s>", "A B", {{"</s>", 0.99}, {"A", 0.005}, {"B", 0.005}}));
  std::map<size_t, ScorerPtr> scorers{
      {1, std::make_shared<ScriptedScorer>(std::move(m1))},
      {2, std::make_shared<ScriptedScorer>(std::move(m2))},
  };
  return ModelBank(1, 2, std::move(scorers), {{1, 0.9}, {2, 0.0}});
}

DecodeOutcome decode_fixed(const Scorer& scorer, size_t k, const Sentence& source,
                           std::optional<size_t> catchup = std::nullopt) {
  SentenceStream stream(source);
  return fixed_policy_decode(scorer, k, stream,
                             catchup, DecodeLimits::for_source_len(source.unmarked_size()));
}

DecodeOutcome decode_adaptive(const ModelBank& bank, const Sentence& source) {
  SentenceStream stream(source);
  return adaptive_decode(bank, stream, DecodeLimits::for_source_len(source.unmarked_size()));
}

}  // namespace

TEST_CASE("sentence streams yield the end marker exactly once, last") {
  SentenceStream stream(sent("a b"));
  CHECK(*stream.next() == tok("a"));
  CHECK(*stream.next() == tok("b"));
  CHECK(stream.next()->is_end_marker());
  CHECK_FALSE(stream.next().has_value());

  SentenceStream marked(sent("a </s>"));
  CHECK(*marked.next() == tok("a"));
  CHECK(marked.next()->is_end_marker());
  CHECK_FALSE(marked.next().has_value());

  SentenceStream empty{Sentence{}};
  CHECK(empty.next()->is_end_marker());
  CHECK_FALSE(empty.next().has_value());
}

TEST_CASE("linear threshold schedules") {
  auto full = linear_thresholds({1.0, 0.0, 1, 10});
  CHECK(full.size() == 10);
  CHECK(full.at(1) == 1.0);
  CHECK(full.at(10) == 0.0);
  CHECK(full.at(5) == doctest::Approx(5.0 / 9.0).epsilon(1e-13));

  auto partial = linear_thresholds({0.4, 0.0, 1, 10});
  CHECK(partial.at(2) == doctest::Approx(0.4 - 0.4 / 9.0).epsilon(1e-13));

  auto flat = linear_thresholds({0.3, 0.3, 2, 6});
  for (const auto& [k, rho] : flat) CHECK(rho == 0.3);

  auto single = linear_thresholds({0.8, 0.1, 4, 4});
  CHECK(single.size() == 1);
  CHECK(single.at(4) == 0.8);

  CHECK_THROWS_AS(linear_thresholds({1.2, 0.0, 1, 2}), ArgumentError);
  CHECK_THROWS_AS(linear_thresholds({0.5, -0.1, 1, 2}), ArgumentError);
  CHECK_THROWS_AS(linear_thresholds({0.5, 0.5, 3, 2}), ArgumentError);
}

TEST_CASE("the standard endpoint grid has the 18 settings") {
  auto grid = standard_threshold_grid();
  REQUIRE(grid.size() == 18);
  for (int i = 0; i < 8; ++i) {
    CHECK(grid[i].first == doctest::Approx((i + 2) / 10.0).epsilon(1e-15));
    CHECK(grid[i].second == 0.0);
  }
  for (int i = 0; i < 10; ++i) {
    CHECK(grid[8 + i].first == 1.0);
    CHECK(grid[8 + i].second == doctest::Approx(i / 10.0).epsilon(1e-15));
  }
}

TEST_CASE("wait-3 decode follows g(t) = min(|x|, t+2)") {
  const size_t n = 10;
  std::vector<ScriptedScorer::Entry> entries;
  Sentence target;
  const Sentence source = numbered_source(n);
  for (size_t t = 1; t <= 11; ++t) {
    // raw consumed prefix at step t under wait-3 (marker included once the
    // schedule passes the source)
    const size_t want = t + 2;
    Sentence visible = source.prefix(std::min(want, n));
    if (want > n) visible.push_back(Token::end_marker());
    const char* out = t == 11 ? "</s>" : nullptr;
    const std::string written = out ? std::string(out) : "w" + std::to_string(t);
    std::map<Token, double> probs{{Token(written), 0.9}, {tok("filler"), 0.1}};
    entries.push_back(ScriptedScorer::Entry{visible, target, Distribution(std::move(probs))});
    target.push_back(Token(written));
  }
  ScriptedScorer scorer(std::move(entries));
  DecodeOutcome outcome = decode_fixed(scorer, 3, source);

  REQUIRE_FALSE(outcome.truncated);
  REQUIRE(outcome.hypothesis.unmarked_size() == 10);
  CHECK(outcome.trace.to_string() ==
        "R R R W R W R W R W R W R W R W R W R W W W");
  for (size_t t = 1; t <= 10; ++t) {
    const size_t g = std::min(outcome.trace.reads_before_write(t), n);
    CHECK(g == std::min(n, t + 2));
  }
  CHECK_FALSE(validate_outcome(outcome).has_value());
}

TEST_CASE("wait-1 with an identity dictionary copies the source") {
  const Sentence source = sent("a b c d e");
  auto scorer = identity_dictionary(source);
  DecodeOutcome outcome = decode_fixed(*scorer, 1, source);
  CHECK(outcome.hypothesis.without_marker() == source);
  CHECK(outcome.hypothesis.ends_with_marker());
  CHECK(outcome.trace.to_string() == "R W R W R W R W R W R W");
  CHECK_FALSE(outcome.truncated);
}

TEST_CASE("catchup inserts one extra read per block of writes") {
  const Sentence source = numbered_source(20);
  auto scorer = identity_dictionary(source);
  DecodeOutcome outcome = decode_fixed(*scorer, 1, source, /*catchup=*/6);
  // writes 1..6 follow g(t) = t; write 7 has one extra read
  CHECK(outcome.trace.reads_before_write(6) == 6);
  CHECK(outcome.trace.reads_before_write(7) == 8);
  for (size_t t = 1; t <= outcome.hypothesis.unmarked_size(); ++t) {
    const size_t expected = std::min<size_t>(20, t + (t - 1) / 6);
    CHECK(std::min<size_t>(outcome.trace.reads_before_write(t), 20) == expected);
  }
}

TEST_CASE("adaptive fixture reproduces the hand trace") {
  ModelBank bank = fixture_bank();
  DecodeOutcome outcome = decode_adaptive(bank, sent("s1 s2"));
  CHECK(outcome.hypothesis.joined() == "A B </s>");
  CHECK(outcome.trace.to_string() == "R W R R W W");
  REQUIRE(outcome.confidences.size() == 3);
  CHECK(outcome.confidences[0] == 0.95);
  CHECK(outcome.confidences[1] == 0.7);
  CHECK(outcome.confidences[2] == 0.99);
  CHECK_FALSE(outcome.truncated);
  CHECK_FALSE(validate_outcome(outcome).has_value());
}

TEST_CASE("degenerate thresholds reduce to fixed policies") {
  std::mt19937_64 rng(31);
  auto vocab = std::make_shared<Vocabulary>(
      std::vector<Token>{tok("a"), tok("b"), tok("c"), Token::end_marker()});
  for (int round = 0; round < 20; ++round) {
    auto scorer = std::make_shared<LazyRandomScorer>(vocab, rng());
    const size_t k_min = 1 + rng() % 3;
    const size_t k_max = k_min + rng() % 3;
    std::map<size_t, ScorerPtr> scorers;
    std::map<size_t, double> zeros, ones;
    for (size_t k = k_min; k <= k_max; ++k) {
      scorers[k] = scorer;
      zeros[k] = 0.0;
      ones[k] = 1.0;
    }
    const Sentence source = numbered_source(3 + rng() % 8);

    ModelBank eager(k_min, k_max, scorers, zeros);
    DecodeOutcome adaptive_eager = decode_adaptive(eager, source);
    DecodeOutcome fixed_min = decode_fixed(*scorer, k_min, source);
    CHECK(adaptive_eager.trace == fixed_min.trace);
    CHECK(adaptive_eager.hypothesis == fixed_min.hypothesis);

    ModelBank lazy(k_min, k_max, scorers, ones);
    DecodeOutcome adaptive_lazy = decode_adaptive(lazy, source);
    DecodeOutcome fixed_max = decode_fixed(*scorer, k_max, source);
    CHECK(adaptive_lazy.trace == fixed_max.trace);
    CHECK(adaptive_lazy.hypothesis == fixed_max.hypothesis);
  }
}

TEST_CASE("adaptive lag stays within [k_min, k_max] before the source ends") {
  std::mt19937_64 rng(47);
  for (int round = 0; round < 100; ++round) {
    const size_t vocab_size = 2 + rng() % 5;
    std::vector<Token> tokens{Token::end_marker()};
    for (size_t i = 1; i < vocab_size; ++i) tokens.push_back(tok("t" + std::to_string(i)));
    auto vocab = std::make_shared<Vocabulary>(std::move(tokens));

    const size_t k_min = 1 + rng() % 5;
    const size_t k_max = k_min + rng() % (6 - k_min);
    std::map<size_t, ScorerPtr> scorers;
    std::map<size_t, double> thresholds;
    std::uniform_real_distribution<double> rho(0.0, 1.0);
    for (size_t k = k_min; k <= k_max; ++k) {
      scorers[k] = std::make_shared<LazyRandomScorer>(vocab, rng());
      thresholds[k] = rho(rng);
    }
    ModelBank bank(k_min, k_max, std::move(scorers), std::move(thresholds));

    const size_t n = 1 + rng() % 12;
    const Sentence source = numbered_source(n);
    DecodeOutcome outcome = decode_adaptive(bank, source);

    size_t reads = 0;
    size_t writes = 0;
    for (Action action : outcome.trace.actions()) {
      if (action == Action::kRead) {
        ++reads;
        continue;
      }
      if (reads <= n) {  // the marker is read n+1 reads in
        const long long lag = static_cast<long long>(reads) - static_cast<long long>(writes);
        CHECK(lag >= static_cast<long long>(k_min));
        CHECK(lag <= static_cast<long long>(k_max));
      }
      ++writes;
    }
    // termination bounds
    CHECK(reads <= n + 1);
    CHECK(outcome.hypothesis.unmarked_size() <= DecodeLimits::for_source_len(n).max_len_cap);
  }
}

TEST_CASE("adaptive consults the bundle and threshold of the current lag") {
  std::mt19937_64 rng(59);
  auto vocab = std::make_shared<Vocabulary>(
      std::vector<Token>{tok("a"), tok("b"), Token::end_marker()});
  std::vector<RecordingScorer::Call> logs[4];
  std::map<size_t, ScorerPtr> scorers;
  std::map<size_t, double> thresholds;
  for (size_t k = 1; k <= 3; ++k) {
    scorers[k] = std::make_shared<RecordingScorer>(
        std::make_shared<LazyRandomScorer>(vocab, rng()), &logs[k]);
    thresholds[k] = 0.5;
  }
  ModelBank bank(1, 3, std::move(scorers), std::move(thresholds));
  decode_adaptive(bank, numbered_source(9));

  for (size_t k = 1; k <= 3; ++k) {
    for (const auto& call : logs[k]) {
      if (call.source_has_marker) {
        // tail calls go to the k_max bundle only
        CHECK(k == 3);
      } else {
        CHECK(call.lag == static_cast<long long>(k));
      }
    }
  }
  CHECK((logs[1].size() + logs[2].size() + logs[3].size()) > 0);
}

TEST_CASE("fixed decode without catchup matches the closed-form schedule") {
  for (size_t k : {1, 2, 3, 5, 8}) {
    const size_t n = 12;
    const Sentence source = numbered_source(n);
    auto scorer = identity_dictionary(source);
    DecodeOutcome outcome = decode_fixed(*scorer, k, source);
    for (size_t t = 1; t <= outcome.hypothesis.unmarked_size(); ++t) {
      CHECK(std::min(outcome.trace.reads_before_write(t), n) == wait_k_visible(k, t, n));
    }
  }
}

TEST_CASE("decode caps flag truncation") {
  // a scorer that never proposes the end marker
  auto scorer = std::make_shared<ConstScorer>(
      Distribution({{tok("a"), 0.6}, {tok("b"), 0.3}, {Token::end_marker(), 0.1}}));
  SentenceStream stream(sent("x y z"));
  DecodeOutcome outcome = fixed_policy_decode(*scorer, 2, stream, std::nullopt, DecodeLimits{4});
  CHECK(outcome.truncated);
  CHECK(outcome.hypothesis.unmarked_size() == 4);
  CHECK_FALSE(outcome.hypothesis.ends_with_marker());
}

TEST_CASE("empty sentences end immediately") {
  ModelBank bank = fixture_bank();
  DecodeOutcome outcome = decode_adaptive(bank, Sentence{});
  CHECK(outcome.hypothesis.ends_with_marker());
  CHECK(outcome.trace.read_count() == 1);
}

TEST_CASE("model bank validation") {
  auto vocab_a = std::make_shared<Vocabulary>(std::vector<Token>{tok("a"), Token::end_marker()});
  auto vocab_b = std::make_shared<Vocabulary>(std::vector<Token>{tok("b"), Token::end_marker()});
  auto scorer_a = std::make_shared<LazyRandomScorer>(vocab_a, 1);
  auto scorer_b = std::make_shared<LazyRandomScorer>(vocab_b, 2);

  CHECK_THROWS_AS(ModelBank(0, 1, {{1, scorer_a}}, {{1, 0.5}}), ArgumentError);
  CHECK_THROWS_AS(ModelBank(2, 1, {{1, scorer_a}}, {{1, 0.5}}), ArgumentError);
  CHECK_THROWS_AS(ModelBank(1, 2, {{1, scorer_a}}, {{1, 0.5}, {2, 0.5}}), ArgumentError);
  CHECK_THROWS_AS(ModelBank(1, 1, {{1, scorer_a}}, {{1, 1.5}}), ArgumentError);
  CHECK_THROWS_AS(ModelBank(1, 2, {{1, scorer_a}, {2, scorer_b}}, {{1, 0.5}, {2, 0.5}}),
                  ConfigError);
  CHECK_NOTHROW(ModelBank(1, 1, {{1, scorer_a}}, {{1, 0.5}}));
}

// ---------------------------------------------------------------------------
// Baseline scenarios.

TEST_CASE("wait-if-diff writes forever when the top never changes") {
  ConstScorer scorer(Distribution({{tok("A"), 0.6}, {tok("B"), 0.3}, {Token::end_marker(), 0.1}}));
  SentenceStream stream(sent("s1 s2 s3 s4"));
  DecodeOutcome outcome = wait_if_diff_decode(scorer, {2, 1}, stream, DecodeLimits{6});
  CHECK(outcome.trace.to_string() == "R R W W W W W W");
  CHECK(outcome.hypothesis.joined() == "A A A A A A");
  CHECK(outcome.truncated);
}

TEST_CASE("wait-if-diff reads to exhaustion when tops alternate") {
  std::vector<ScriptedScorer::Entry> entries;
  entries.push_back(entry("s1 s2", "", {{"A", 0.6}, {"B", 0.3}, {"</s>", 0.1}}));
  entries.push_back(entry("s1 s2", "A", {{"B", 0.6}, {"A", 0.3}, {"</s>", 0.1}}));
  entries.push_back(entry("s1 s2 s3", "A", {{"A", 0.6}, {"B", 0.3}, {"</s>", 0.1}}));
  entries.push_back(entry("s1 s2 s3 s4", "A", {{"B", 0.6}, {"A", 0.3}, {"</s>", 0.1}}));
  entries.push_back(entry("s1 s2 s3 s4 </s>", "A", {{"</s>", 0.9}, {"A", 0.05}, {"B", 0.05}}));
  ScriptedScorer scorer(std::move(entries));
  SentenceStream stream(sent("s1 s2 s3 s4"));
  DecodeOutcome outcome = wait_if_diff_decode(scorer, {2, 1}, stream, DecodeLimits{50});
  CHECK(outcome.trace.to_string() == "R R W R R R W");
  CHECK(outcome.hypothesis.joined() == "A </s>");
  CHECK_FALSE(outcome.truncated);
}

TEST_CASE("wait-if-diff writes through period-2 tops when delta is 2") {
  std::vector<ScriptedScorer::Entry> entries;
  entries.push_back(entry("s1 s2", "", {{"A", 0.6}, {"B", 0.4}}));
  entries.push_back(entry("s1 s2", "A", {{"B", 0.6}, {"A", 0.4}}));
  entries.push_back(entry("s1 s2", "A B", {{"A", 0.6}, {"B", 0.4}}));
  entries.push_back(entry("s1 s2", "A B A", {{"B", 0.6}, {"A", 0.4}}));
  ScriptedScorer scorer(std::move(entries));
  SentenceStream stream(sent("s1 s2 s3 s4"));
  DecodeOutcome outcome = wait_if_diff_decode(scorer, {2, 2}, stream, DecodeLimits{4});
  CHECK(outcome.trace.to_string() == "R R W W W W");
  CHECK(outcome.hypothesis.joined() == "A B A B");
  CHECK(outcome.truncated);
}

TEST_CASE("wait-if-worse never reads once confidence is non-decreasing") {
  std::vector<ScriptedScorer::Entry> entries;
  entries.push_back(entry("s1", "", {{"A", 0.5}, {"B", 0.3}, {"</s>", 0.2}}));
  entries.push_back(entry("s1", "A", {{"B", 0.6}, {"A", 0.2}, {"</s>", 0.2}}));
  entries.push_back(entry("s1", "A B", {{"</s>", 0.9}, {"A", 0.05}, {"B", 0.05}}));
  ScriptedScorer scorer(std::move(entries));
  SentenceStream stream(sent("s1 s2 s3"));
  DecodeOutcome outcome = wait_if_worse_decode(scorer, {1, 1}, stream, DecodeLimits{50});
  CHECK(outcome.trace.to_string() == "R W W W");
  CHECK(outcome.hypothesis.joined() == "A B </s>");
  REQUIRE(outcome.confidences.size() == 3);
  CHECK(outcome.confidences[0] == 0.5);
  CHECK(outcome.confidences[1] == 0.6);
  CHECK(outcome.confidences[2] == 0.9);
}

TEST_CASE("wait-if-worse reads when the top probability drops") {
  std::vector<ScriptedScorer::Entry> entries;
  entries.push_back(entry("s1", "", {{"A", 0.9}, {"B", 0.05}, {"</s>", 0.05}}));
  entries.push_back(entry("s1", "A", {{"B", 0.8}, {"A", 0.1}, {"</s>", 0.1}}));
  entries.push_back(entry("s1 s2", "A", {{"B", 0.85}, {"A", 0.1}, {"</s>", 0.05}}));
  entries.push_back(entry("s1 s2", "A B", {{"</s>", 0.95}, {"A", 0.025}, {"B", 0.025}}));
  ScriptedScorer scorer(std::move(entries));
  SentenceStream stream(sent("s1 s2"));
  DecodeOutcome outcome = wait_if_worse_decode(scorer, {1, 1}, stream, DecodeLimits{50});
  CHECK(outcome.trace.to_string() == "R W R W W");
  CHECK(outcome.hypothesis.joined() == "A B </s>");
  REQUIRE(outcome.confidences.size() == 3);
  CHECK(outcome.confidences[0] == 0.9);
  CHECK(outcome.confidences[1] == 0.85);
  CHECK(outcome.confidences[2] == 0.95);
}

TEST_CASE("wait-if-worse writes on equal probabilities") {
  ConstScorer scorer(Distribution({{tok("A"), 0.5}, {tok("B"), 0.3}, {Token::end_marker(), 0.2}}));
  SentenceStream stream(sent("s1 s2 s3"));
  DecodeOutcome outcome = wait_if_worse_decode(scorer, {1, 1}, stream, DecodeLimits{3});
  CHECK(outcome.trace.to_string() == "R W W W");
  CHECK(outcome.hypothesis.joined() == "A A A");
  CHECK(outcome.truncated);
}

TEST_CASE("baselines require a positive delta") {
  ConstScorer scorer(Distribution({{tok("A"), 1.0}}));
  SentenceStream stream(sent("s1"));
  CHECK_THROWS_AS(wait_if_diff_decode(scorer, {0, 0}, stream, DecodeLimits{5}), ArgumentError);
}
