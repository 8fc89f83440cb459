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

#ifndef SIMULDEC_HARNESS_HPP
#define SIMULDEC_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "ensemble.hpp"
#include "policies.hpp"

namespace simuldec {

enum class Method {
  kWaitK,
  kTestTimeWaitK,
  kAdaptiveSingle,
  kAdaptiveEnsembleTop3,
  kAdaptiveEnsembleAll,
  kWaitIfDiff,
  kWaitIfWorse,
  kFullSentenceGreedy,
};

const std::string& method_name(Method method);
Method parse_method(const std::string& name);

// One scorer source: a scripted table or a dictionary lexicon.
struct ScorerSpec {
  enum class Kind { kScripted, kDictionary };
  Kind kind = Kind::kScripted;
  std::string path;
  double gamma = 0.5;  // dictionary only

  // "scripted:PATH", "dict:PATH" or "dict:PATH:gamma=G".
  static ScorerSpec parse(const std::string& text);
  bool operator==(const ScorerSpec& other) const = default;
};

// Everything a sweep needs beyond the corpus. Loaded from a sectioned
// key-value config file (see docs/config.md); scorer paths are resolved
// relative to the config file's directory. `method` may stay unset for
// configs that only feed eval-matrix / select-ensemble.
struct SweepConfig {
  std::optional<Method> method;
  uint64_t seed = 0;
  std::optional<size_t> max_len_cap;    // absent: 2*source_len+50 per sentence
  std::optional<size_t> catchup_every;  // fixed-policy methods only
  size_t jobs = 1;

  std::vector<size_t> k_list;  // wait_k / test_time_wait_k grid

  size_t k_min = 1;  // adaptive_* bank range
  size_t k_max = 1;
  std::vector<std::pair<double, double>> rho_endpoints;  // adaptive grid

  std::vector<size_t> s0_list;  // baseline grids
  std::vector<size_t> delta_list;

  std::map<size_t, std::vector<ScorerSpec>> bank;  // per-lag scorers
  std::vector<ScorerSpec> model;                   // the single mismatched/baseline scorer
  std::vector<std::pair<std::string, ScorerSpec>> models;        // model registry, in order
  std::map<size_t, std::vector<std::string>> ensemble_members;   // per-lag member ids
  std::vector<size_t> matrix_policies;

  // Parses and validates for the configured method. Throws ConfigError with
  // file/line context on any problem, including unknown keys.
  static SweepConfig load(const std::string& path);
};

// One sweep result row.
struct RunRecord {
  std::string method;
  std::string params;
  double bleu = 0.0;
  double al = 0.0;
  size_t sentences = 0;
  double sec_per_token = 0.0;
};

// Decodes the whole corpus at every grid point, in declaration order, and
// scores each point: corpus BLEU over unmarked hypotheses, mean per-sentence
// AL, and mean wall-clock seconds per written token. Deterministic apart
// from sec_per_token regardless of cfg.jobs. A failing grid point aborts
// with its identity in the message.
std::vector<RunRecord> run_sweep(const SweepConfig& config, const Corpus& corpus);

// Decodes the corpus at the first grid point only, preserving order.
std::vector<DecodeOutcome> run_decode(const SweepConfig& config, const Corpus& corpus);

// Report CSV: header `method,params,bleu,al,sentences,sec_per_token`, LF
// line endings, bleu with 2 decimals, al with 3, sec_per_token with 4.
void emit_report(const std::vector<RunRecord>& records, std::ostream& out);
void emit_report(const std::vector<RunRecord>& records, const std::string& path);
std::vector<RunRecord> read_report(const std::string& path);

// Concatenates report CSVs in argument order after schema validation.
std::vector<RunRecord> merge_reports(const std::vector<std::string>& paths);

// Builds the model registry and scores it over the corpus with every policy
// in cfg.matrix_policies (fixed-policy decode + corpus BLEU per cell).
EvalMatrix run_eval_matrix(const SweepConfig& config, const Corpus& corpus);

// Writes a `[ensemble]` config fragment selecting the top-n models per
// matrix policy, consumable by the adaptive_ensemble_top3 method.
void write_ensemble_selection(const EvalMatrix& matrix, size_t top_n, std::ostream& out);

}  // namespace simuldec

#endif  // SIMULDEC_HARNESS_HPP
