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

#include "ensemble.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "metrics.hpp"
#include "policies.hpp"
#include "util.hpp"

namespace simuldec {

EnsembleScorer::EnsembleScorer(std::vector<ScorerPtr> members) : members_(std::move(members)) {
  if (members_.empty()) throw ArgumentError("ensemble requires at least one member");
  for (const ScorerPtr& member : members_) {
    if (!member) throw ArgumentError("ensemble member is null");
    if (!(member->vocab() == members_.front()->vocab())) {
      throw ConfigError("ensemble members do not share one target vocabulary");
    }
  }
}

Distribution EnsembleScorer::score(const Sentence& source_prefix,
                                   const Sentence& target_prefix) const {
  std::vector<Distribution> results;
  results.reserve(members_.size());
  for (const ScorerPtr& member : members_) {
    results.push_back(member->score(source_prefix, target_prefix));
  }
  const long double n = static_cast<long double>(members_.size());
  std::map<Token, double> mean;
  for (const Token& token : vocab().tokens()) {
    long double sum = 0.0L;
    for (const Distribution& result : results) sum += result.prob(token);
    mean.emplace(token, static_cast<double>(sum / n));
  }
  return Distribution(std::move(mean));
}

EvalMatrix::EvalMatrix(std::vector<ModelRef> models, std::vector<size_t> policies,
                       std::vector<double> cells)
    : models_(std::move(models)), policies_(std::move(policies)), cells_(std::move(cells)) {
  if (models_.empty() || policies_.empty()) {
    throw ArgumentError("evaluation matrix must have at least one model and one policy");
  }
  if (cells_.size() != models_.size() * policies_.size()) {
    throw ArgumentError("evaluation matrix is not complete over models x policies");
  }
}

size_t EvalMatrix::model_index(const std::string& model_id) const {
  for (size_t i = 0; i < models_.size(); ++i) {
    if (models_[i].id == model_id) return i;
  }
  throw ArgumentError("unknown model id: " + model_id);
}

size_t EvalMatrix::policy_index(size_t policy_k) const {
  for (size_t i = 0; i < policies_.size(); ++i) {
    if (policies_[i] == policy_k) return i;
  }
  throw ArgumentError("unknown policy column: k=" + std::to_string(policy_k));
}

double EvalMatrix::bleu(const std::string& model_id, size_t policy_k) const {
  return cells_[model_index(model_id) * policies_.size() + policy_index(policy_k)];
}

void EvalMatrix::write_csv(std::ostream& out) const {
  out << "model,policy_k,bleu\n";
  char buffer[64];
  for (size_t m = 0; m < models_.size(); ++m) {
    for (size_t p = 0; p < policies_.size(); ++p) {
      std::snprintf(buffer, sizeof(buffer), "%.6f", cells_[m * policies_.size() + p]);
      out << models_[m].id << ',' << policies_[p] << ',' << buffer << '\n';
    }
  }
}

namespace {

size_t trained_k_from_id(const std::string& id) {
  size_t end = id.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(id[end - 1]))) --end;
  if (end == id.size()) return std::numeric_limits<size_t>::max();
  return static_cast<size_t>(std::stoull(id.substr(end)));
}

}  // namespace

EvalMatrix EvalMatrix::read_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(name + ": empty matrix file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "model,policy_k,bleu") {
    throw DataError(name + ": expected header 'model,policy_k,bleu', got '" + line + "'");
  }
  std::vector<ModelRef> models;
  std::vector<size_t> policies;
  std::map<std::pair<std::string, size_t>, double> values;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string model, k_text, bleu_text;
    if (!std::getline(row, model, ',') || !std::getline(row, k_text, ',') ||
        !std::getline(row, bleu_text)) {
      throw DataError(name + ":" + std::to_string(line_no) + ": expected model,policy_k,bleu");
    }
    size_t policy_k = 0;
    double bleu = 0.0;
    try {
      policy_k = static_cast<size_t>(std::stoull(k_text));
      bleu = std::stod(bleu_text);
    } catch (const std::exception&) {
      throw DataError(name + ":" + std::to_string(line_no) + ": bad numeric field");
    }
    if (std::none_of(models.begin(), models.end(),
                     [&](const ModelRef& m) { return m.id == model; })) {
      models.push_back(ModelRef{model, trained_k_from_id(model)});
    }
    if (std::find(policies.begin(), policies.end(), policy_k) == policies.end()) {
      policies.push_back(policy_k);
    }
    if (!values.emplace(std::make_pair(model, policy_k), bleu).second) {
      throw DataError(name + ":" + std::to_string(line_no) + ": duplicate cell");
    }
  }
  std::vector<double> cells;
  cells.reserve(models.size() * policies.size());
  for (const ModelRef& model : models) {
    for (size_t policy_k : policies) {
      auto it = values.find(std::make_pair(model.id, policy_k));
      if (it == values.end()) {
        throw DataError(name + ": missing cell for model " + model.id + ", k=" +
                        std::to_string(policy_k));
      }
      cells.push_back(it->second);
    }
  }
  return EvalMatrix(std::move(models), std::move(policies), std::move(cells));
}

EvalMatrix evaluate_matrix(const std::vector<ModelEntry>& models,
                           const std::vector<size_t>& policies, const Corpus& dev_corpus,
                           const MatrixOptions& options) {
  if (models.empty()) throw ArgumentError("evaluate_matrix requires at least one model");
  if (policies.empty()) throw ArgumentError("evaluate_matrix requires at least one policy");
  if (dev_corpus.size() == 0) throw ArgumentError("evaluate_matrix requires a non-empty corpus");
  for (const auto& refs : dev_corpus.reference_sets) {
    if (refs.empty()) throw ArgumentError("evaluate_matrix requires references for every sentence");
  }

  std::vector<EvalMatrix::ModelRef> refs;
  refs.reserve(models.size());
  for (const ModelEntry& model : models) {
    refs.push_back(EvalMatrix::ModelRef{model.id, model.trained_k});
  }

  std::vector<double> cells;
  cells.reserve(models.size() * policies.size());
  for (const ModelEntry& model : models) {
    for (size_t policy_k : policies) {
      std::vector<Sentence> hypotheses(dev_corpus.size());
      parallel_for(dev_corpus.size(), options.jobs, [&](size_t i) {
        const Sentence& source = dev_corpus.sources[i];
        DecodeLimits limits{options.max_len_cap
                                ? *options.max_len_cap
                                : DecodeLimits::for_source_len(source.unmarked_size()).max_len_cap};
        SentenceStream stream(source);
        DecodeOutcome outcome =
            fixed_policy_decode(*model.scorer, policy_k, stream, options.catchup_every, limits);
        hypotheses[i] = outcome.hypothesis.without_marker();
      });
      cells.push_back(corpus_bleu(hypotheses, dev_corpus.reference_sets).bleu);
    }
  }
  return EvalMatrix(std::move(refs), policies, std::move(cells));
}

std::vector<std::string> select_top_n(const EvalMatrix& matrix, size_t policy_k, size_t n) {
  if (n == 0 || n > matrix.models().size()) {
    throw ArgumentError("top-n must lie in [1, model count]");
  }
  std::vector<EvalMatrix::ModelRef> order = matrix.models();
  std::stable_sort(order.begin(), order.end(),
                   [&](const EvalMatrix::ModelRef& a, const EvalMatrix::ModelRef& b) {
                     const double bleu_a = matrix.bleu(a.id, policy_k);
                     const double bleu_b = matrix.bleu(b.id, policy_k);
                     if (bleu_a != bleu_b) return bleu_a > bleu_b;
                     if (a.trained_k != b.trained_k) return a.trained_k < b.trained_k;
                     return a.id < b.id;
                   });
  std::vector<std::string> selected;
  selected.reserve(n);
  for (size_t i = 0; i < n; ++i) selected.push_back(order[i].id);
  return selected;
}

}  // namespace simuldec
