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

#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <unordered_map>

namespace simuldec {

LatencyReport average_lagging(const ActionTrace& trace, size_t source_len, size_t hyp_len) {
  if (source_len == 0 || hyp_len == 0) {
    throw ArgumentError("average_lagging requires positive unmarked lengths");
  }
  if (trace.write_count() < hyp_len) {
    throw ArgumentError("trace has fewer writes than the hypothesis length");
  }

  // Policy values for the first hyp_len writes, clamped so the read of the
  // end marker itself is not counted.
  std::vector<size_t> g;
  g.reserve(hyp_len);
  size_t reads = 0;
  for (Action action : trace.actions()) {
    if (action == Action::kRead) {
      ++reads;
    } else {
      g.push_back(std::min(reads, source_len));
      if (g.size() == hyp_len) break;
    }
  }

  size_t tau = hyp_len;
  for (size_t t = 1; t <= hyp_len; ++t) {
    if (g[t - 1] == source_len) {
      tau = t;
      break;
    }
  }

  const double ratio = static_cast<double>(hyp_len) / static_cast<double>(source_len);
  double sum = 0.0;
  for (size_t t = 1; t <= tau; ++t) {
    sum += static_cast<double>(g[t - 1]) - static_cast<double>(t - 1) / ratio;
  }
  return LatencyReport{sum / static_cast<double>(tau), tau, ratio};
}

namespace {

struct BleuStats {
  std::array<size_t, 4> matched{};
  std::array<size_t, 4> total{};
  size_t hyp_len = 0;
  size_t eff_ref_len = 0;

  BleuStats& operator+=(const BleuStats& other) {
    for (size_t n = 0; n < 4; ++n) {
      matched[n] += other.matched[n];
      total[n] += other.total[n];
    }
    hyp_len += other.hyp_len;
    eff_ref_len += other.eff_ref_len;
    return *this;
  }
};

// n-gram key: tokens joined with an unlikely separator. Tokens contain no
// whitespace, so '\x1f' never collides.
std::string ngram_key(const std::vector<Token>& tokens, size_t start, size_t n) {
  std::string key;
  for (size_t i = 0; i < n; ++i) {
    if (i > 0) key += '\x1f';
    key += tokens[start + i].str();
  }
  return key;
}

std::unordered_map<std::string, size_t> ngram_counts(const std::vector<Token>& tokens, size_t n) {
  std::unordered_map<std::string, size_t> counts;
  if (tokens.size() >= n) {
    for (size_t i = 0; i + n <= tokens.size(); ++i) ++counts[ngram_key(tokens, i, n)];
  }
  return counts;
}

size_t closest_ref_len(size_t hyp_len, const std::vector<Sentence>& references) {
  size_t best = references.front().size();
  for (const Sentence& ref : references) {
    const size_t len = ref.size();
    const size_t d_len = len > hyp_len ? len - hyp_len : hyp_len - len;
    const size_t d_best = best > hyp_len ? best - hyp_len : hyp_len - best;
    if (d_len < d_best || (d_len == d_best && len < best)) best = len;
  }
  return best;
}

BleuStats sentence_stats(const Sentence& hypothesis, const std::vector<Sentence>& references) {
  if (references.empty()) throw ArgumentError("reference set must be non-empty");
  BleuStats stats;
  const auto& hyp = hypothesis.tokens();
  stats.hyp_len = hyp.size();
  stats.eff_ref_len = closest_ref_len(hyp.size(), references);
  for (size_t n = 1; n <= 4; ++n) {
    if (hyp.size() < n) break;
    stats.total[n - 1] = hyp.size() - n + 1;
    auto counts = ngram_counts(hyp, n);
    std::unordered_map<std::string, size_t> clip;
    for (const Sentence& ref : references) {
      for (const auto& [key, count] : ngram_counts(ref.tokens(), n)) {
        auto [it, inserted] = clip.emplace(key, count);
        if (!inserted) it->second = std::max(it->second, count);
      }
    }
    for (const auto& [key, count] : counts) {
      auto it = clip.find(key);
      if (it != clip.end()) stats.matched[n - 1] += std::min(count, it->second);
    }
  }
  return stats;
}

BleuReport finalize(const BleuStats& stats, bool smooth) {
  BleuReport report;
  report.hyp_len = stats.hyp_len;
  report.eff_ref_len = stats.eff_ref_len;
  if (stats.hyp_len == 0) {
    report.brevity_penalty = 0.0;
    return report;
  }
  report.brevity_penalty =
      stats.hyp_len >= stats.eff_ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(stats.eff_ref_len) / static_cast<double>(stats.hyp_len));

  bool positive = true;
  double log_sum = 0.0;
  for (size_t n = 0; n < 4; ++n) {
    double precision;
    if (smooth && n > 0) {
      precision = static_cast<double>(stats.matched[n] + 1) / static_cast<double>(stats.total[n] + 1);
    } else {
      precision = stats.total[n] == 0
                      ? 0.0
                      : static_cast<double>(stats.matched[n]) / static_cast<double>(stats.total[n]);
    }
    report.ngram_precisions[n] = precision;
    if (precision > 0.0) {
      log_sum += std::log(precision);
    } else {
      positive = false;
    }
  }
  if (positive) {
    report.bleu = 100.0 * report.brevity_penalty * std::exp(log_sum / 4.0);
  }
  return report;
}

}  // namespace

BleuReport corpus_bleu(const std::vector<Sentence>& hypotheses,
                       const std::vector<std::vector<Sentence>>& reference_sets) {
  if (hypotheses.size() != reference_sets.size()) {
    throw ArgumentError("hypothesis count " + std::to_string(hypotheses.size()) +
                        " != reference set count " + std::to_string(reference_sets.size()));
  }
  if (hypotheses.empty()) throw ArgumentError("corpus_bleu requires at least one sentence");
  BleuStats stats;
  for (size_t i = 0; i < hypotheses.size(); ++i) {
    stats += sentence_stats(hypotheses[i], reference_sets[i]);
  }
  return finalize(stats, /*smooth=*/false);
}

BleuReport sentence_bleu(const Sentence& hypothesis, const std::vector<Sentence>& references) {
  return finalize(sentence_stats(hypothesis, references), /*smooth=*/true);
}

double timing_summary(const std::vector<DecodeOutcome>& outcomes) {
  if (outcomes.empty()) throw ArgumentError("timing_summary requires at least one outcome");
  double sum = 0.0;
  size_t writes = 0;
  for (const DecodeOutcome& outcome : outcomes) {
    for (double seconds : outcome.elapsed_per_write) {
      sum += seconds;
      ++writes;
    }
  }
  if (writes == 0) throw ArgumentError("timing_summary requires at least one write");
  return sum / static_cast<double>(writes);
}

}  // namespace simuldec
