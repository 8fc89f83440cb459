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

#ifndef SIMULDEC_POLICIES_HPP
#define SIMULDEC_POLICIES_HPP

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "core.hpp"
#include "scorers.hpp"

namespace simuldec {

// Incremental token supply for one source sentence. Implementations yield
// the end marker exactly once, as the final token, then nullopt.
class StreamSource {
 public:
  virtual ~StreamSource() = default;
  virtual std::optional<Token> next() = 0;
};

// Streams a sentence's tokens and appends the end marker unless the
// sentence already carries one.
class SentenceStream final : public StreamSource {
 public:
  explicit SentenceStream(Sentence sentence);
  std::optional<Token> next() override;

 private:
  Sentence sentence_;
  size_t cursor_ = 0;
  bool marker_sent_ = false;
};

// A scorer per lag k in [k_min, k_max] plus the write threshold for that
// lag. Scorer entries may be single models or ensembles; all must share one
// target vocabulary.
class ModelBank {
 public:
  ModelBank(size_t k_min, size_t k_max, std::map<size_t, ScorerPtr> scorers,
            std::map<size_t, double> thresholds);

  size_t k_min() const { return k_min_; }
  size_t k_max() const { return k_max_; }
  const Scorer& scorer(size_t k) const;
  ScorerPtr scorer_ptr(size_t k) const;
  double threshold(size_t k) const;
  const Vocabulary& vocab() const;

 private:
  size_t k_min_;
  size_t k_max_;
  std::map<size_t, ScorerPtr> scorers_;
  std::map<size_t, double> thresholds_;
};

// Endpoints of a linear per-lag threshold schedule.
struct ThresholdSchedule {
  double rho_first = 1.0;  // threshold at k_min
  double rho_last = 0.0;   // threshold at k_max
  size_t k_min = 1;
  size_t k_max = 1;
};

// Interpolates thresholds linearly between the endpoints:
// rho_{k_min+j} = rho_first - d*j with d = (rho_first - rho_last)/(k_max - k_min).
// A single-k range yields just rho_first. Endpoints must lie in [0,1].
std::map<size_t, double> linear_thresholds(const ThresholdSchedule& schedule);

// The standard 18-point endpoint grid used by threshold sweeps:
// rho_first in {0.2,...,0.9} paired with rho_last = 0, then rho_first = 1
// paired with rho_last in {0,...,0.9}.
std::vector<std::pair<double, double>> standard_threshold_grid();

// Shared decode limits. `max_len_cap` bounds the number of unmarked tokens
// a hypothesis may reach; hitting it flags the outcome truncated.
struct DecodeLimits {
  size_t max_len_cap = 0;

  // 2*unmarked_source + 50, the default cap for a known source length.
  static DecodeLimits for_source_len(size_t unmarked_source_len);
};

// Fixed wait-k decoding: the t-th write happens after min(|x|, t+k-1) reads,
// plus one extra read after every `catchup_every` writes when catchup is
// enabled. Decoding continues past source exhaustion until the end marker is
// written or the cap hits. Applying a scorer trained for a different
// schedule (or none) realizes test-time wait-k; k larger than any source
// realizes full-sentence greedy decoding.
DecodeOutcome fixed_policy_decode(const Scorer& scorer, size_t k, StreamSource& source,
                                  std::optional<size_t> catchup_every,
                                  const DecodeLimits& limits);

// Adaptive decoding by composition of the bank's wait-k policies. Each step
// computes the lag k = |x| - |y| (markers counted); below k_min it reads;
// otherwise the lag-k scorer force-decodes the prefix pair and the top token
// is written iff k >= k_max or its probability reaches the lag's threshold.
// After the source end marker arrives, the k_max scorer writes out the tail.
DecodeOutcome adaptive_decode(const ModelBank& bank, StreamSource& source,
                              const DecodeLimits& limits);

// Heuristic baseline parameters: s0 initial reads, delta the history offset
// the decision rule compares against.
struct BaselineConfig {
  size_t s0 = 0;
  size_t delta = 1;
};

// Reads s0 tokens, then at each step writes the current top token unless it
// differs from the top token delta decision steps earlier, in which case it
// reads. Steps without delta-history write. After exhaustion it writes out
// the tail like fixed decoding.
DecodeOutcome wait_if_diff_decode(const Scorer& scorer, const BaselineConfig& config,
                                  StreamSource& source, const DecodeLimits& limits);

// As wait_if_diff_decode, but reads when the current top probability is
// strictly smaller than the one delta decision steps earlier.
DecodeOutcome wait_if_worse_decode(const Scorer& scorer, const BaselineConfig& config,
                                   StreamSource& source, const DecodeLimits& limits);

}  // namespace simuldec

#endif  // SIMULDEC_POLICIES_HPP
