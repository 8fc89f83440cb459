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

#include "policies.hpp"

#include <chrono>
#include <limits>

namespace simuldec {

namespace {

size_t saturating_add(size_t a, size_t b) {
  return a > std::numeric_limits<size_t>::max() - b ? std::numeric_limits<size_t>::max() : a + b;
}

// Mutable state of one decode: the consumed source prefix, the growing
// hypothesis, and the bookkeeping the outcome is assembled from. Write
// timing covers everything since the previous write, so the cost of
// intervening read decisions is charged to the token they delayed.
class DecodeRun {
 public:
  DecodeRun(StreamSource& source, size_t max_len_cap)
      : source_(source), cap_(max_len_cap), last_mark_(std::chrono::steady_clock::now()) {}

  const Sentence& consumed() const { return x_; }
  const Sentence& hypothesis() const { return y_; }

  bool marker_read() const { return marker_read_; }
  bool hypothesis_done() const { return y_.ends_with_marker(); }
  bool at_cap() const { return y_.unmarked_size() >= cap_; }

  void read() {
    auto token = source_.next();
    if (!token) throw DataError("stream ended without yielding the end marker");
    if (token->is_end_marker()) marker_read_ = true;
    x_.push_back(std::move(*token));
    trace_.push_back(Action::kRead);
  }

  void write(Token token, double prob) {
    const auto now = std::chrono::steady_clock::now();
    elapsed_.push_back(std::chrono::duration<double>(now - last_mark_).count());
    last_mark_ = now;
    y_.push_back(std::move(token));
    trace_.push_back(Action::kWrite);
    confidences_.push_back(prob);
  }

  DecodeOutcome finish(bool truncated) && {
    return DecodeOutcome{std::move(y_), std::move(trace_), std::move(confidences_),
                         std::move(elapsed_), truncated};
  }

 private:
  StreamSource& source_;
  size_t cap_;
  Sentence x_;
  Sentence y_;
  ActionTrace trace_;
  std::vector<double> confidences_;
  std::vector<double> elapsed_;
  bool marker_read_ = false;
  std::chrono::steady_clock::time_point last_mark_;
};

}  // namespace

SentenceStream::SentenceStream(Sentence sentence) : sentence_(std::move(sentence)) {}

std::optional<Token> SentenceStream::next() {
  if (cursor_ < sentence_.size()) {
    Token token = sentence_.at(cursor_++);
    if (token.is_end_marker()) marker_sent_ = true;
    return token;
  }
  if (!marker_sent_) {
    marker_sent_ = true;
    return Token::end_marker();
  }
  return std::nullopt;
}

ModelBank::ModelBank(size_t k_min, size_t k_max, std::map<size_t, ScorerPtr> scorers,
                     std::map<size_t, double> thresholds)
    : k_min_(k_min), k_max_(k_max), scorers_(std::move(scorers)), thresholds_(std::move(thresholds)) {
  if (k_min_ == 0 || k_min_ > k_max_) {
    throw ArgumentError("bank requires 1 <= k_min <= k_max");
  }
  const Vocabulary* shared = nullptr;
  for (size_t k = k_min_; k <= k_max_; ++k) {
    auto scorer_it = scorers_.find(k);
    if (scorer_it == scorers_.end() || !scorer_it->second) {
      throw ArgumentError("bank is missing a scorer for k=" + std::to_string(k));
    }
    auto threshold_it = thresholds_.find(k);
    if (threshold_it == thresholds_.end()) {
      throw ArgumentError("bank is missing a threshold for k=" + std::to_string(k));
    }
    if (threshold_it->second < 0.0 || threshold_it->second > 1.0) {
      throw ArgumentError("threshold for k=" + std::to_string(k) + " outside [0,1]");
    }
    if (!shared) {
      shared = &scorer_it->second->vocab();
    } else if (!(*shared == scorer_it->second->vocab())) {
      throw ConfigError("bank scorers do not share one target vocabulary");
    }
  }
}

const Scorer& ModelBank::scorer(size_t k) const { return *scorer_ptr(k); }

ScorerPtr ModelBank::scorer_ptr(size_t k) const {
  auto it = scorers_.find(k);
  if (it == scorers_.end()) {
    throw ArgumentError("no scorer for k=" + std::to_string(k));
  }
  return it->second;
}

double ModelBank::threshold(size_t k) const {
  auto it = thresholds_.find(k);
  if (it == thresholds_.end()) {
    throw ArgumentError("no threshold for k=" + std::to_string(k));
  }
  return it->second;
}

const Vocabulary& ModelBank::vocab() const { return scorer(k_min_).vocab(); }

std::map<size_t, double> linear_thresholds(const ThresholdSchedule& schedule) {
  if (schedule.k_min == 0 || schedule.k_min > schedule.k_max) {
    throw ArgumentError("schedule requires 1 <= k_min <= k_max");
  }
  for (double rho : {schedule.rho_first, schedule.rho_last}) {
    if (rho < 0.0 || rho > 1.0) {
      throw ArgumentError("threshold endpoints must lie in [0,1]");
    }
  }
  std::map<size_t, double> thresholds;
  if (schedule.k_min == schedule.k_max) {
    thresholds[schedule.k_min] = schedule.rho_first;
    return thresholds;
  }
  const double slope = (schedule.rho_first - schedule.rho_last) /
                       static_cast<double>(schedule.k_max - schedule.k_min);
  for (size_t k = schedule.k_min; k <= schedule.k_max; ++k) {
    thresholds[k] = schedule.rho_first - slope * static_cast<double>(k - schedule.k_min);
  }
  return thresholds;
}

std::vector<std::pair<double, double>> standard_threshold_grid() {
  std::vector<std::pair<double, double>> grid;
  for (int i = 2; i <= 9; ++i) {
    grid.emplace_back(static_cast<double>(i) / 10.0, 0.0);
  }
  for (int i = 0; i <= 9; ++i) {
    grid.emplace_back(1.0, static_cast<double>(i) / 10.0);
  }
  return grid;
}

DecodeLimits DecodeLimits::for_source_len(size_t unmarked_source_len) {
  return DecodeLimits{2 * unmarked_source_len + 50};
}

DecodeOutcome fixed_policy_decode(const Scorer& scorer, size_t k, StreamSource& source,
                                  std::optional<size_t> catchup_every,
                                  const DecodeLimits& limits) {
  if (k == 0) throw ArgumentError("fixed_policy_decode requires k >= 1");
  if (catchup_every && *catchup_every == 0) {
    throw ArgumentError("catchup_every must be positive");
  }
  DecodeRun run(source, limits.max_len_cap);
  bool truncated = false;
  while (!run.hypothesis_done()) {
    if (run.at_cap()) {
      truncated = true;
      break;
    }
    const size_t t = run.hypothesis().size() + 1;
    size_t want = saturating_add(t - 1, k);
    if (catchup_every) want = saturating_add(want, (t - 1) / *catchup_every);
    while (run.consumed().size() < want && !run.marker_read()) run.read();
    auto [token, prob] = scorer.score(run.consumed(), run.hypothesis()).argmax();
    run.write(std::move(token), prob);
  }
  return std::move(run).finish(truncated);
}

DecodeOutcome adaptive_decode(const ModelBank& bank, StreamSource& source,
                              const DecodeLimits& limits) {
  DecodeRun run(source, limits.max_len_cap);
  bool truncated = false;

  // Main loop: runs until either sequence carries its end marker. Lag
  // counts every consumed element, the end marker included.
  while (!run.hypothesis_done() && !run.marker_read()) {
    if (run.at_cap()) {
      truncated = true;
      break;
    }
    const long long lag = static_cast<long long>(run.consumed().size()) -
                          static_cast<long long>(run.hypothesis().size());
    if (lag < static_cast<long long>(bank.k_min())) {
      // Below k_min the branch outcome is READ no matter what the scorer
      // says, so the call is skipped.
      run.read();
      continue;
    }
    const size_t k = static_cast<size_t>(lag);
    ScoreResult result = force_decode(bank.scorer(k), k, run.consumed(), run.hypothesis());
    if (k >= bank.k_max() || result.top_prob >= bank.threshold(k)) {
      run.write(std::move(result.top_token), result.top_prob);
    } else {
      run.read();
    }
  }

  // Tail: the whole source is in; the k_max scorer writes the rest out.
  while (!truncated && !run.hypothesis_done()) {
    if (run.at_cap()) {
      truncated = true;
      break;
    }
    ScoreResult result =
        force_decode(bank.scorer(bank.k_max()), bank.k_max(), run.consumed(), run.hypothesis());
    run.write(std::move(result.top_token), result.top_prob);
  }
  return std::move(run).finish(truncated);
}

namespace {

enum class BaselineRule { kDiff, kWorse };

DecodeOutcome baseline_decode(const Scorer& scorer, const BaselineConfig& config,
                              StreamSource& source, const DecodeLimits& limits,
                              BaselineRule rule) {
  if (config.delta == 0) throw ArgumentError("baseline delta must be >= 1");
  DecodeRun run(source, limits.max_len_cap);
  for (size_t i = 0; i < config.s0 && !run.marker_read(); ++i) run.read();

  std::vector<ScoreResult> history;
  bool truncated = false;
  while (!run.hypothesis_done()) {
    if (run.at_cap()) {
      truncated = true;
      break;
    }
    auto [token, prob] = scorer.score(run.consumed(), run.hypothesis()).argmax();
    history.push_back(ScoreResult{token, prob});
    const size_t step = history.size();

    bool read = false;
    if (!run.marker_read() && step > config.delta) {
      const ScoreResult& past = history[step - 1 - config.delta];
      read = rule == BaselineRule::kDiff ? !(token == past.top_token) : prob < past.top_prob;
    }
    if (read) {
      run.read();
    } else {
      run.write(std::move(token), prob);
    }
  }
  return std::move(run).finish(truncated);
}

}  // namespace

DecodeOutcome wait_if_diff_decode(const Scorer& scorer, const BaselineConfig& config,
                                  StreamSource& source, const DecodeLimits& limits) {
  return baseline_decode(scorer, config, source, limits, BaselineRule::kDiff);
}

DecodeOutcome wait_if_worse_decode(const Scorer& scorer, const BaselineConfig& config,
                                   StreamSource& source, const DecodeLimits& limits) {
  return baseline_decode(scorer, config, source, limits, BaselineRule::kWorse);
}

}  // namespace simuldec
