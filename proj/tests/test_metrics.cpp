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

#include <algorithm>
#include <cmath>
#include <random>

#include "metrics.hpp"
#include "support.hpp"

using namespace simuldec;
using namespace simuldec::test;

namespace {

// Streaming wait-k trace over n source tokens and m written tokens, marker
// actions included, exactly as the fixed decoder schedules them.
ActionTrace wait_k_trace(size_t k, size_t n, size_t m) {
  ActionTrace trace;
  size_t reads = 0;
  for (size_t t = 1; t <= m + 1; ++t) {  // +1: the end-marker write
    const size_t want = std::min(t + k - 1, n + 1);
    while (reads < want) {
      trace.push_back(Action::kRead);
      ++reads;
    }
    trace.push_back(Action::kWrite);
  }
  return trace;
}

}  // namespace

TEST_CASE("AL of wait-3 with equal lengths is 3, cut at step 8") {
  LatencyReport report = average_lagging(wait_k_trace(3, 10, 10), 10, 10);
  CHECK(report.tau == 8);
  CHECK(report.al == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(report.length_ratio == 1.0);
}

TEST_CASE("AL of a full-sentence policy is the source length") {
  ActionTrace trace;
  for (size_t i = 0; i < 11; ++i) trace.push_back(Action::kRead);  // 10 + marker
  for (size_t i = 0; i < 11; ++i) trace.push_back(Action::kWrite);
  LatencyReport report = average_lagging(trace, 10, 10);
  CHECK(report.tau == 1);
  CHECK(report.al == doctest::Approx(10.0).epsilon(1e-13));
}

TEST_CASE("AL of wait-1 with equal lengths is 1") {
  LatencyReport report = average_lagging(wait_k_trace(1, 12, 12), 12, 12);
  CHECK(report.al == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("AL ignores writes past the cutoff") {
  ActionTrace trace = wait_k_trace(2, 8, 8);
  LatencyReport before = average_lagging(trace, 8, 8);
  for (int i = 0; i < 5; ++i) trace.push_back(Action::kWrite);
  LatencyReport after = average_lagging(trace, 8, 8);
  CHECK(before.al == after.al);
  CHECK(before.tau == after.tau);
}

TEST_CASE("AL falls back to hyp_len when the source is never covered") {
  // 3 reads of a 10-token source, then writes only
  ActionTrace trace = ActionTrace::parse("R R R W W W W");
  LatencyReport report = average_lagging(trace, 10, 4);
  CHECK(report.tau == 4);
  // summands: 3-0, 3-2.5, 3-5, 3-7.5 with r = 0.4
  CHECK(report.al == doctest::Approx((3.0 + 0.5 - 2.0 - 4.5) / 4.0).epsilon(1e-12));
}

TEST_CASE("AL argument validation") {
  CHECK_THROWS_AS(average_lagging(ActionTrace::parse("R W"), 0, 1), ArgumentError);
  CHECK_THROWS_AS(average_lagging(ActionTrace::parse("R W"), 1, 0), ArgumentError);
  CHECK_THROWS_AS(average_lagging(ActionTrace::parse("R W"), 1, 2), ArgumentError);
}

TEST_CASE("identity corpus scores 100") {
  std::vector<Sentence> hyps{sent("a b c d e"), sent("x y z w")};
  std::vector<std::vector<Sentence>> refs{{sent("a b c d e")}, {sent("x y z w")}};
  BleuReport report = corpus_bleu(hyps, refs);
  CHECK(report.bleu == 100.0);
  CHECK(report.brevity_penalty == 1.0);
}

TEST_CASE("the four-token worked example") {
  BleuReport report = corpus_bleu({sent("a b c d")}, {{sent("a b c d e")}});
  for (double p : report.ngram_precisions) CHECK(p == 1.0);
  CHECK(report.hyp_len == 4);
  CHECK(report.eff_ref_len == 5);
  CHECK(report.brevity_penalty == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
  CHECK(report.bleu == doctest::Approx(77.8800783071405).epsilon(1e-9));
}

TEST_CASE("no shared unigram scores zero") {
  BleuReport report = corpus_bleu({sent("q r s t")}, {{sent("a b c d")}});
  CHECK(report.bleu == 0.0);
}

TEST_CASE("corpus BLEU matches the brute-force counter") {
  std::mt19937_64 rng(101);
  for (int round = 0; round < 200; ++round) {
    MicroCorpus corpus = random_micro_corpus(rng);
    const double expected = brute_force_corpus_bleu(corpus.hypotheses, corpus.reference_sets);
    const double actual = corpus_bleu(corpus.hypotheses, corpus.reference_sets).bleu;
    CHECK(std::fabs(actual - expected) <= 1e-9);
  }
}

TEST_CASE("corpus BLEU is invariant under sentence order") {
  std::mt19937_64 rng(202);
  MicroCorpus corpus = random_micro_corpus(rng);
  while (corpus.hypotheses.size() < 2) corpus = random_micro_corpus(rng);
  BleuReport original = corpus_bleu(corpus.hypotheses, corpus.reference_sets);

  std::vector<size_t> order(corpus.hypotheses.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Sentence> hyps;
  std::vector<std::vector<Sentence>> refs;
  for (size_t i : order) {
    hyps.push_back(corpus.hypotheses[i]);
    refs.push_back(corpus.reference_sets[i]);
  }
  BleuReport shuffled = corpus_bleu(hyps, refs);
  CHECK(original.bleu == shuffled.bleu);
  CHECK(original.brevity_penalty == shuffled.brevity_penalty);
}

TEST_CASE("BLEU stays in range and decomposes") {
  std::mt19937_64 rng(303);
  for (int round = 0; round < 100; ++round) {
    MicroCorpus corpus = random_micro_corpus(rng);
    BleuReport report = corpus_bleu(corpus.hypotheses, corpus.reference_sets);
    CHECK(report.bleu >= 0.0);
    CHECK(report.bleu <= 100.0);
    CHECK(report.brevity_penalty <= 1.0);
    bool all_positive = true;
    double log_sum = 0.0;
    for (double p : report.ngram_precisions) {
      if (p > 0.0) {
        log_sum += std::log(p);
      } else {
        all_positive = false;
      }
    }
    if (all_positive) {
      CHECK(std::fabs(report.bleu - 100.0 * report.brevity_penalty * std::exp(log_sum / 4.0)) <=
            1e-9);
    }
  }
}

TEST_CASE("corpus BLEU argument validation") {
  CHECK_THROWS_AS(corpus_bleu({sent("a")}, {}), ArgumentError);
  CHECK_THROWS_AS(corpus_bleu({sent("a")}, {{}}), ArgumentError);
}

TEST_CASE("sentence BLEU smooths higher orders only") {
  CHECK(sentence_bleu(sent("a b c d"), {sent("a b c d")}).bleu == 100.0);

  // one matching token against a longer reference: BP dominates
  BleuReport one = sentence_bleu(sent("a"), {sent("a b")});
  CHECK(one.ngram_precisions[0] == 1.0);
  CHECK(one.ngram_precisions[1] == 1.0);  // (0+1)/(0+1)
  CHECK(one.bleu == doctest::Approx(100.0 * std::exp(1.0 - 2.0)).epsilon(1e-9));
  CHECK(one.bleu < 100.0);

  // no shared unigram: raw unigram precision keeps the score at zero
  CHECK(sentence_bleu(sent("q r"), {sent("a b")}).bleu == 0.0);
}

TEST_CASE("timing summary pools every write") {
  DecodeOutcome a;
  a.hypothesis = sent("x");
  a.trace = ActionTrace::parse("R W");
  a.confidences = {1.0};
  a.elapsed_per_write = {0.01};
  DecodeOutcome b = a;
  b.elapsed_per_write = {0.03};
  CHECK(timing_summary({a, b}) == doctest::Approx(0.02).epsilon(1e-12));

  DecodeOutcome single = a;
  single.elapsed_per_write = {0.0122};
  CHECK(timing_summary({single}) == 0.0122);

  CHECK_THROWS_AS(timing_summary({}), ArgumentError);
  DecodeOutcome empty;
  CHECK_THROWS_AS(timing_summary({empty}), ArgumentError);
}
