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

#ifndef SIMULDEC_ENSEMBLE_HPP
#define SIMULDEC_ENSEMBLE_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "scorers.hpp"

namespace simuldec {

// Arithmetic-mean ensemble over scorers sharing one vocabulary. It is a
// Scorer itself, so it drops into any decoder or bank slot. Member sums are
// accumulated in extended precision: with one member the result is
// bit-identical to that member, and reordering members cannot change it.
class EnsembleScorer final : public Scorer {
 public:
  // Throws ArgumentError when empty, ConfigError on vocabulary mismatch.
  explicit EnsembleScorer(std::vector<ScorerPtr> members);

  Distribution score(const Sentence& source_prefix,
                     const Sentence& target_prefix) const override;
  const Vocabulary& vocab() const override { return members_.front()->vocab(); }

  size_t member_count() const { return members_.size(); }

 private:
  std::vector<ScorerPtr> members_;
};

// A model available to matrix evaluation: an id, the wait-k schedule it was
// built for (used only to break selection ties), and the scorer itself.
struct ModelEntry {
  std::string id;
  size_t trained_k = 0;
  ScorerPtr scorer;
};

// Dev-set BLEU of every model under every applied wait-k policy.
class EvalMatrix {
 public:
  struct ModelRef {
    std::string id;
    size_t trained_k = 0;
  };

  EvalMatrix(std::vector<ModelRef> models, std::vector<size_t> policies,
             std::vector<double> cells);  // cells model-major

  const std::vector<ModelRef>& models() const { return models_; }
  const std::vector<size_t>& policies() const { return policies_; }
  double bleu(const std::string& model_id, size_t policy_k) const;

  // CSV with header `model,policy_k,bleu`, one row per cell, model-major.
  void write_csv(std::ostream& out) const;
  // Inverse of write_csv. Models and policies are taken in order of first
  // appearance; a model's trained_k is recovered from trailing digits in
  // its id (absent digits sort last in ties). The grid must be complete.
  static EvalMatrix read_csv(std::istream& in, const std::string& name);

 private:
  size_t model_index(const std::string& model_id) const;
  size_t policy_index(size_t policy_k) const;

  std::vector<ModelRef> models_;
  std::vector<size_t> policies_;
  std::vector<double> cells_;
};

struct MatrixOptions {
  std::optional<size_t> catchup_every;
  std::optional<size_t> max_len_cap;  // default: 2*source+50 per sentence
  size_t jobs = 1;
};

// Fixed-policy-decodes the dev corpus with every (model, k') pair and
// records corpus BLEU per cell. The corpus must be non-empty and carry
// references.
EvalMatrix evaluate_matrix(const std::vector<ModelEntry>& models,
                           const std::vector<size_t>& policies, const Corpus& dev_corpus,
                           const MatrixOptions& options);

// Ids of the n models with the highest BLEU in the policy's column, best
// first. Ties break to the smaller trained_k, then the lexicographically
// smaller id.
std::vector<std::string> select_top_n(const EvalMatrix& matrix, size_t policy_k, size_t n);

}  // namespace simuldec

#endif  // SIMULDEC_ENSEMBLE_HPP
