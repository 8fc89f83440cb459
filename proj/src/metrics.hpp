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

#ifndef SIMULDEC_METRICS_HPP
#define SIMULDEC_METRICS_HPP

#include <array>
#include <vector>

#include "core.hpp"

namespace simuldec {

// Average Lagging over one decode, in source tokens. tau is the cutoff
// step: the first target step whose policy value covers the whole source.
struct LatencyReport {
  double al = 0.0;
  size_t tau = 0;
  double length_ratio = 0.0;  // hyp_len / source_len
};

// AL = (1/tau) * sum_{t=1..tau} [ g(t) - (t-1)/r ]
// with r = hyp_len/source_len, g(t) the number of reads before the t-th
// write clamped to source_len (so a read that merely consumed the end
// marker does not count), and tau = min{t : g(t) = source_len}, falling
// back to hyp_len when the trace never covers the source. Lengths are
// unmarked token counts and must be positive.
LatencyReport average_lagging(const ActionTrace& trace, size_t source_len, size_t hyp_len);

// Corpus- or sentence-level BLEU-4 breakdown. bleu is in [0,100] and, when
// every precision is positive, equals
// brevity_penalty * (p1*p2*p3*p4)^(1/4) * 100.
struct BleuReport {
  double bleu = 0.0;
  std::array<double, 4> ngram_precisions{};
  double brevity_penalty = 1.0;
  size_t hyp_len = 0;
  size_t eff_ref_len = 0;
};

// Corpus-level BLEU-4, unsmoothed. Clipped n-gram counts take the
// per-n-gram maximum over the references of each sentence; the effective
// reference length is the reference closest in length to the hypothesis
// (ties to the shorter); BP = min(1, exp(1 - ref_len/hyp_len)). Tokens are
// compared verbatim, so strip end markers before scoring.
BleuReport corpus_bleu(const std::vector<Sentence>& hypotheses,
                       const std::vector<std::vector<Sentence>>& reference_sets);

// Single-pair BLEU-4 for diagnostics, with add-one smoothing on the n >= 2
// precisions (the unigram precision is left raw, so a hypothesis sharing no
// token with the references still scores zero).
BleuReport sentence_bleu(const Sentence& hypothesis, const std::vector<Sentence>& references);

// Arithmetic mean duration over every WRITE in `outcomes`, in seconds.
// Throws ArgumentError when there are no writes at all.
double timing_summary(const std::vector<DecodeOutcome>& outcomes);

}  // namespace simuldec

#endif  // SIMULDEC_METRICS_HPP
