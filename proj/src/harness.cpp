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

#include "harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "metrics.hpp"
#include "util.hpp"

namespace simuldec {

namespace {

const std::vector<std::pair<Method, std::string>>& method_table() {
  static const std::vector<std::pair<Method, std::string>> table = {
      {Method::kWaitK, "wait_k"},
      {Method::kTestTimeWaitK, "test_time_wait_k"},
      {Method::kAdaptiveSingle, "adaptive_single"},
      {Method::kAdaptiveEnsembleTop3, "adaptive_ensemble_top3"},
      {Method::kAdaptiveEnsembleAll, "adaptive_ensemble_all"},
      {Method::kWaitIfDiff, "wait_if_diff"},
      {Method::kWaitIfWorse, "wait_if_worse"},
      {Method::kFullSentenceGreedy, "full_sentence_greedy"},
  };
  return table;
}

std::string trim(const std::string& text) {
  size_t begin = 0;
  size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%g", value);
  return buffer;
}

// ---------------------------------------------------------------------------
// Sectioned key-value config files.

struct IniItem {
  std::string key;
  std::string value;
  size_t line = 0;
  mutable bool consumed = false;
};

struct IniSection {
  std::string name;
  size_t line = 0;
  std::vector<IniItem> items;
  mutable bool consumed = false;
};

class IniFile {
 public:
  IniFile(const std::string& path, std::istream& in) : path_(path) {
    std::string line;
    size_t line_no = 0;
    IniSection* current = nullptr;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string text = trim(line);
      if (text.empty() || text[0] == '#' || text[0] == ';') continue;
      if (text.front() == '[') {
        if (text.back() != ']') throw ConfigError(at(line_no) + "unterminated section header");
        std::string name = trim(text.substr(1, text.size() - 2));
        if (name.empty()) throw ConfigError(at(line_no) + "empty section name");
        sections_.push_back(IniSection{std::move(name), line_no, {}, false});
        current = &sections_.back();
        continue;
      }
      const size_t eq = text.find('=');
      if (eq == std::string::npos) throw ConfigError(at(line_no) + "expected key = value");
      if (!current) throw ConfigError(at(line_no) + "key outside of any [section]");
      IniItem item{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line_no, false};
      if (item.key.empty()) throw ConfigError(at(line_no) + "empty key");
      for (const IniItem& existing : current->items) {
        if (existing.key == item.key) {
          throw ConfigError(at(line_no) + "duplicate key '" + item.key + "'");
        }
      }
      current->items.push_back(std::move(item));
    }
  }

  const IniSection* section(const std::string& name) const {
    for (const IniSection& section : sections_) {
      if (section.name == name) {
        section.consumed = true;
        return &section;
      }
    }
    return nullptr;
  }

  std::optional<std::string> value(const std::string& section_name, const std::string& key) const {
    const IniSection* s = section(section_name);
    if (!s) return std::nullopt;
    for (const IniItem& item : s->items) {
      if (item.key == key) {
        item.consumed = true;
        return item.value;
      }
    }
    return std::nullopt;
  }

  // Strictness: every section and key must have been touched.
  void reject_unconsumed() const {
    for (const IniSection& section : sections_) {
      if (!section.consumed) {
        throw ConfigError(at(section.line) + "unknown section [" + section.name + "]");
      }
      for (const IniItem& item : section.items) {
        if (!item.consumed) {
          throw ConfigError(at(item.line) + "unknown key '" + item.key + "' in [" + section.name +
                            "]");
        }
      }
    }
  }

  std::string at(size_t line_no) const { return path_ + ":" + std::to_string(line_no) + ": "; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::vector<IniSection> sections_;
};

size_t parse_size(const std::string& text, const std::string& context) {
  try {
    size_t consumed = 0;
    const unsigned long long value = std::stoull(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return static_cast<size_t>(value);
  } catch (const std::exception&) {
    throw ConfigError(context + ": expected a non-negative integer, got '" + text + "'");
  }
}

double parse_double(const std::string& text, const std::string& context) {
  try {
    size_t consumed = 0;
    const double value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    throw ConfigError(context + ": expected a number, got '" + text + "'");
  }
}

// Comma list of integers, where an item may also be an inclusive "a..b" range.
std::vector<size_t> parse_size_list(const std::string& text, const std::string& context) {
  std::vector<size_t> values;
  for (const std::string& item : split_list(text)) {
    const size_t dots = item.find("..");
    if (dots == std::string::npos) {
      values.push_back(parse_size(item, context));
      continue;
    }
    const size_t lo = parse_size(item.substr(0, dots), context);
    const size_t hi = parse_size(item.substr(dots + 2), context);
    if (lo > hi) throw ConfigError(context + ": empty range '" + item + "'");
    for (size_t v = lo; v <= hi; ++v) values.push_back(v);
  }
  if (values.empty()) throw ConfigError(context + ": empty list");
  return values;
}

size_t parse_lag_key(const std::string& key, const std::string& context) {
  if (key.size() < 2 || key[0] != 'k') {
    throw ConfigError(context + ": expected key of the form k<lag>, got '" + key + "'");
  }
  const size_t k = parse_size(key.substr(1), context);
  if (k == 0) throw ConfigError(context + ": lag must be >= 1");
  return k;
}

}  // namespace

const std::string& method_name(Method method) {
  for (const auto& [value, name] : method_table()) {
    if (value == method) return name;
  }
  throw ArgumentError("unknown method");
}

Method parse_method(const std::string& name) {
  for (const auto& [value, method_label] : method_table()) {
    if (method_label == name) return value;
  }
  std::string known;
  for (const auto& [value, method_label] : method_table()) {
    if (!known.empty()) known += ", ";
    known += method_label;
  }
  throw ConfigError("unknown method '" + name + "' (known: " + known + ")");
}

ScorerSpec ScorerSpec::parse(const std::string& text) {
  ScorerSpec spec;
  if (text.rfind("scripted:", 0) == 0) {
    spec.kind = Kind::kScripted;
    spec.path = text.substr(9);
  } else if (text.rfind("dict:", 0) == 0) {
    spec.kind = Kind::kDictionary;
    std::string rest = text.substr(5);
    const size_t gamma_at = rest.rfind(":gamma=");
    if (gamma_at != std::string::npos) {
      spec.gamma = parse_double(rest.substr(gamma_at + 7), "scorer spec '" + text + "'");
      rest = rest.substr(0, gamma_at);
    }
    spec.path = rest;
  } else {
    throw ConfigError("scorer spec must start with 'scripted:' or 'dict:', got '" + text + "'");
  }
  if (spec.path.empty()) throw ConfigError("scorer spec has an empty path: '" + text + "'");
  return spec;
}

namespace {

// ---------------------------------------------------------------------------
// Config loading.

std::vector<ScorerSpec> parse_spec_list(const std::string& value, const std::string& context,
                                        const std::filesystem::path& base) {
  std::vector<ScorerSpec> specs;
  for (const std::string& item : split_list(value)) {
    ScorerSpec spec = ScorerSpec::parse(item);
    std::filesystem::path p(spec.path);
    if (p.is_relative()) spec.path = (base / p).lexically_normal().string();
    specs.push_back(std::move(spec));
  }
  if (specs.empty()) throw ConfigError(context + ": empty scorer list");
  return specs;
}

bool needs_bank(Method method) {
  return method == Method::kWaitK || method == Method::kAdaptiveSingle;
}

bool needs_single_model(Method method) {
  return method == Method::kTestTimeWaitK || method == Method::kWaitIfDiff ||
         method == Method::kWaitIfWorse || method == Method::kFullSentenceGreedy;
}

bool is_adaptive(Method method) {
  return method == Method::kAdaptiveSingle || method == Method::kAdaptiveEnsembleTop3 ||
         method == Method::kAdaptiveEnsembleAll;
}

bool is_fixed(Method method) {
  return method == Method::kWaitK || method == Method::kTestTimeWaitK;
}

}  // namespace

SweepConfig SweepConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  IniFile ini(path, in);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  SweepConfig config;
  if (auto method_text = ini.value("sweep", "method")) {
    config.method = parse_method(*method_text);
  }

  if (auto v = ini.value("sweep", "seed")) config.seed = parse_size(*v, path + ": seed");
  if (auto v = ini.value("sweep", "jobs")) {
    config.jobs = parse_size(*v, path + ": jobs");
    if (config.jobs == 0) throw ConfigError(path + ": jobs must be >= 1");
  }
  if (auto v = ini.value("sweep", "max_len_cap")) {
    if (*v != "auto") config.max_len_cap = parse_size(*v, path + ": max_len_cap");
  }
  if (auto v = ini.value("sweep", "catchup_every")) {
    if (config.method && !is_fixed(*config.method)) {
      throw ConfigError(path + ": catchup_every applies to wait_k and test_time_wait_k only");
    }
    const size_t every = parse_size(*v, path + ": catchup_every");
    if (every == 0) throw ConfigError(path + ": catchup_every must be >= 1");
    config.catchup_every = every;
  }

  if (config.method && is_fixed(*config.method)) {
    auto v = ini.value("wait_k", "k");
    if (!v) throw ConfigError(path + ": [wait_k] k list is required");
    config.k_list = parse_size_list(*v, path + ": [wait_k] k");
    for (size_t k : config.k_list) {
      if (k == 0) throw ConfigError(path + ": wait-k lags must be >= 1");
    }
  }

  if (config.method && is_adaptive(*config.method)) {
    auto k_min = ini.value("adaptive", "k_min");
    auto k_max = ini.value("adaptive", "k_max");
    if (!k_min || !k_max) throw ConfigError(path + ": [adaptive] needs k_min and k_max");
    config.k_min = parse_size(*k_min, path + ": k_min");
    config.k_max = parse_size(*k_max, path + ": k_max");
    if (config.k_min == 0 || config.k_min > config.k_max) {
      throw ConfigError(path + ": need 1 <= k_min <= k_max");
    }
    auto grid = ini.value("adaptive", "rho_grid");
    auto endpoints = ini.value("adaptive", "rho_endpoints");
    if ((grid && endpoints) || (!grid && !endpoints)) {
      throw ConfigError(path + ": [adaptive] needs exactly one of rho_grid, rho_endpoints");
    }
    if (grid) {
      if (*grid != "standard") {
        throw ConfigError(path + ": the only named grid is 'standard', got '" + *grid + "'");
      }
      config.rho_endpoints = standard_threshold_grid();
    } else {
      for (const std::string& item : split_list(*endpoints)) {
        const size_t colon = item.find(':');
        if (colon == std::string::npos) {
          throw ConfigError(path + ": rho_endpoints items are first:last, got '" + item + "'");
        }
        const double first = parse_double(item.substr(0, colon), path + ": rho_endpoints");
        const double last = parse_double(item.substr(colon + 1), path + ": rho_endpoints");
        for (double rho : {first, last}) {
          if (rho < 0.0 || rho > 1.0) {
            throw ConfigError(path + ": thresholds must lie in [0,1], got " + format_number(rho));
          }
        }
        config.rho_endpoints.emplace_back(first, last);
      }
      if (config.rho_endpoints.empty()) throw ConfigError(path + ": rho_endpoints is empty");
    }
  }

  if (config.method &&
      (*config.method == Method::kWaitIfDiff || *config.method == Method::kWaitIfWorse)) {
    auto s0 = ini.value("baseline", "s0");
    auto delta = ini.value("baseline", "delta");
    if (!s0 || !delta) throw ConfigError(path + ": [baseline] needs s0 and delta lists");
    config.s0_list = parse_size_list(*s0, path + ": [baseline] s0");
    config.delta_list = parse_size_list(*delta, path + ": [baseline] delta");
    for (size_t delta_value : config.delta_list) {
      if (delta_value == 0) throw ConfigError(path + ": delta must be >= 1");
    }
  }

  if (config.method && needs_bank(*config.method)) {
    const IniSection* bank = ini.section("bank");
    if (!bank) throw ConfigError(path + ": [bank] section is required");
    for (const IniItem& item : bank->items) {
      item.consumed = true;
      const size_t k = parse_lag_key(item.key, ini.at(item.line) + "[bank]");
      config.bank[k] = parse_spec_list(item.value, ini.at(item.line) + "[bank]", base);
    }
  }

  if (config.method && needs_single_model(*config.method)) {
    auto v = ini.value("model", "scorer");
    if (!v) throw ConfigError(path + ": [model] scorer is required");
    config.model = parse_spec_list(*v, path + ": [model] scorer", base);
  }

  const bool needs_registry =
      config.method && (*config.method == Method::kAdaptiveEnsembleTop3 ||
                        *config.method == Method::kAdaptiveEnsembleAll);
  if (const IniSection* models = ini.section("models"); models && !models->items.empty()) {
    for (const IniItem& item : models->items) {
      item.consumed = true;
      if (item.key.find(',') != std::string::npos) {
        throw ConfigError(ini.at(item.line) + "model ids may not contain commas");
      }
      auto specs = parse_spec_list(item.value, ini.at(item.line) + "[models]", base);
      if (specs.size() != 1) {
        throw ConfigError(ini.at(item.line) + "one scorer per model id");
      }
      config.models.emplace_back(item.key, specs.front());
    }
  } else if (needs_registry) {
    throw ConfigError(path + ": [models] registry is required for " + method_name(*config.method));
  }

  if (config.method && *config.method == Method::kAdaptiveEnsembleTop3) {
    const IniSection* ensemble = ini.section("ensemble");
    if (!ensemble) throw ConfigError(path + ": [ensemble] section is required");
    for (const IniItem& item : ensemble->items) {
      item.consumed = true;
      const size_t k = parse_lag_key(item.key, ini.at(item.line) + "[ensemble]");
      auto ids = split_list(item.value);
      if (ids.empty()) throw ConfigError(ini.at(item.line) + "empty member list");
      for (const std::string& id : ids) {
        if (std::none_of(config.models.begin(), config.models.end(),
                         [&](const auto& entry) { return entry.first == id; })) {
          throw ConfigError(ini.at(item.line) + "unknown model id '" + id + "'");
        }
      }
      config.ensemble_members[k] = std::move(ids);
    }
  }

  if (auto v = ini.value("matrix", "policies")) {
    config.matrix_policies = parse_size_list(*v, path + ": [matrix] policies");
    for (size_t k : config.matrix_policies) {
      if (k == 0) throw ConfigError(path + ": matrix policies must be >= 1");
    }
  }

  // Coverage checks that need the whole file parsed.
  if (config.method && *config.method == Method::kWaitK) {
    for (size_t k : config.k_list) {
      if (!config.bank.count(k)) {
        throw ConfigError(path + ": [bank] has no scorer for k=" + std::to_string(k));
      }
    }
  }
  if (config.method && is_adaptive(*config.method)) {
    for (size_t k = config.k_min; k <= config.k_max; ++k) {
      if (*config.method == Method::kAdaptiveSingle && !config.bank.count(k)) {
        throw ConfigError(path + ": [bank] has no scorer for k=" + std::to_string(k));
      }
      if (*config.method == Method::kAdaptiveEnsembleTop3 && !config.ensemble_members.count(k)) {
        throw ConfigError(path + ": [ensemble] has no members for k=" + std::to_string(k));
      }
    }
  }

  ini.reject_unconsumed();

  for (const auto& [k, specs] : config.bank) {
    for (const ScorerSpec& spec : specs) {
      if (!std::filesystem::exists(spec.path)) {
        throw ConfigError(path + ": scorer file does not exist: " + spec.path);
      }
    }
  }
  auto check_exists = [&](const std::vector<ScorerSpec>& specs) {
    for (const ScorerSpec& spec : specs) {
      if (!std::filesystem::exists(spec.path)) {
        throw ConfigError(path + ": scorer file does not exist: " + spec.path);
      }
    }
  };
  check_exists(config.model);
  for (const auto& [id, spec] : config.models) check_exists({spec});

  return config;
}

namespace {

// ---------------------------------------------------------------------------
// Scorer construction with one shared vocabulary per run.

struct ScorerCache {
  std::vector<std::pair<ScorerSpec, ScorerPtr>> built;

  ScorerPtr find(const ScorerSpec& spec) const {
    for (const auto& [key, scorer] : built) {
      if (key == spec) return scorer;
    }
    return nullptr;
  }
};

std::vector<ScorerSpec> all_specs(const SweepConfig& config) {
  std::vector<ScorerSpec> specs;
  auto add = [&](const ScorerSpec& spec) {
    if (std::find(specs.begin(), specs.end(), spec) == specs.end()) specs.push_back(spec);
  };
  for (const auto& [k, list] : config.bank) {
    for (const auto& spec : list) add(spec);
  }
  for (const auto& spec : config.model) add(spec);
  for (const auto& [id, spec] : config.models) add(spec);
  return specs;
}

// Loads every referenced scorer once, over the union vocabulary of the whole
// run, so banks and ensembles see a single shared target vocabulary.
ScorerCache build_scorers(const SweepConfig& config) {
  struct Raw {
    ScorerSpec spec;
    std::vector<ScriptedScorer::Entry> entries;
    std::map<Token, Token> lexicon;
  };
  std::vector<Raw> raws;
  for (const ScorerSpec& spec : all_specs(config)) {
    Raw raw{spec, {}, {}};
    if (spec.kind == ScorerSpec::Kind::kScripted) {
      raw.entries = load_scripted_entries(spec.path);
    } else {
      raw.lexicon = load_dictionary(spec.path);
    }
    raws.push_back(std::move(raw));
  }

  std::vector<Token> union_vocab;
  for (const Raw& raw : raws) {
    for (const auto& entry : raw.entries) {
      for (const auto& [token, p] : entry.distribution.probs()) union_vocab.push_back(token);
    }
    for (const auto& [src, tgt] : raw.lexicon) union_vocab.push_back(tgt);
  }

  ScorerCache cache;
  for (Raw& raw : raws) {
    ScorerPtr scorer;
    try {
      if (raw.spec.kind == ScorerSpec::Kind::kScripted) {
        scorer = std::make_shared<ScriptedScorer>(std::move(raw.entries), union_vocab);
      } else {
        scorer = std::make_shared<DictionaryScorer>(std::move(raw.lexicon), raw.spec.gamma,
                                                    config.seed, union_vocab);
      }
    } catch (const ArgumentError& e) {
      throw DataError(raw.spec.path + ": " + e.what());
    }
    cache.built.emplace_back(raw.spec, std::move(scorer));
  }
  return cache;
}

ScorerPtr bundle_of(const ScorerCache& cache, const std::vector<ScorerSpec>& specs) {
  std::vector<ScorerPtr> members;
  members.reserve(specs.size());
  for (const ScorerSpec& spec : specs) members.push_back(cache.find(spec));
  if (members.size() == 1) return members.front();
  return std::make_shared<EnsembleScorer>(std::move(members));
}

ScorerPtr registry_scorer(const SweepConfig& config, const ScorerCache& cache,
                          const std::string& id) {
  for (const auto& [model_id, spec] : config.models) {
    if (model_id == id) return cache.find(spec);
  }
  throw ConfigError("unknown model id '" + id + "'");
}

// ---------------------------------------------------------------------------
// Grid construction.

struct GridPoint {
  std::string params;
  std::function<DecodeOutcome(const Sentence&)> decode;
};

DecodeLimits limits_for(const SweepConfig& config, const Sentence& source) {
  if (config.max_len_cap) return DecodeLimits{*config.max_len_cap};
  return DecodeLimits::for_source_len(source.unmarked_size());
}

std::string rho_params(double first, double last) {
  return "rho_first=" + format_number(first) + ";rho_last=" + format_number(last);
}

std::vector<GridPoint> build_grid(const SweepConfig& config, const ScorerCache& cache) {
  if (!config.method) throw ConfigError("config does not set a [sweep] method");
  const Method method = *config.method;
  std::vector<GridPoint> grid;
  switch (method) {
    case Method::kWaitK:
    case Method::kTestTimeWaitK: {
      for (size_t k : config.k_list) {
        auto bank_it = config.bank.find(k);
        if (method == Method::kWaitK && bank_it == config.bank.end()) {
          throw ConfigError("[bank] has no scorer for k=" + std::to_string(k));
        }
        ScorerPtr scorer = method == Method::kWaitK ? bundle_of(cache, bank_it->second)
                                                    : bundle_of(cache, config.model);
        grid.push_back(GridPoint{
            "k=" + std::to_string(k), [&config, scorer, k](const Sentence& source) {
              SentenceStream stream(source);
              return fixed_policy_decode(*scorer, k, stream, config.catchup_every,
                                         limits_for(config, source));
            }});
      }
      break;
    }
    case Method::kFullSentenceGreedy: {
      ScorerPtr scorer = bundle_of(cache, config.model);
      // A lag no source can reach turns the fixed policy into read-all-then-write.
      const size_t k = std::numeric_limits<size_t>::max() / 2;
      grid.push_back(GridPoint{"-", [&config, scorer, k](const Sentence& source) {
                                 SentenceStream stream(source);
                                 return fixed_policy_decode(*scorer, k, stream, std::nullopt,
                                                            limits_for(config, source));
                               }});
      break;
    }
    case Method::kAdaptiveSingle:
    case Method::kAdaptiveEnsembleTop3:
    case Method::kAdaptiveEnsembleAll: {
      std::map<size_t, ScorerPtr> scorers;
      for (size_t k = config.k_min; k <= config.k_max; ++k) {
        if (method == Method::kAdaptiveSingle) {
          scorers[k] = bundle_of(cache, config.bank.at(k));
        } else if (method == Method::kAdaptiveEnsembleTop3) {
          std::vector<ScorerPtr> members;
          for (const std::string& id : config.ensemble_members.at(k)) {
            members.push_back(registry_scorer(config, cache, id));
          }
          scorers[k] = members.size() == 1 ? members.front()
                                           : std::make_shared<EnsembleScorer>(std::move(members));
        } else {
          std::vector<ScorerPtr> members;
          for (const auto& [id, spec] : config.models) members.push_back(cache.find(spec));
          if (members.empty()) throw ConfigError("[models] registry is empty");
          scorers[k] = members.size() == 1 ? members.front()
                                           : std::make_shared<EnsembleScorer>(std::move(members));
        }
      }
      for (const auto& [first, last] : config.rho_endpoints) {
        auto thresholds =
            linear_thresholds(ThresholdSchedule{first, last, config.k_min, config.k_max});
        auto bank = std::make_shared<ModelBank>(config.k_min, config.k_max, scorers,
                                                std::move(thresholds));
        grid.push_back(GridPoint{rho_params(first, last), [&config, bank](const Sentence& source) {
                                   SentenceStream stream(source);
                                   return adaptive_decode(*bank, stream, limits_for(config, source));
                                 }});
      }
      break;
    }
    case Method::kWaitIfDiff:
    case Method::kWaitIfWorse: {
      ScorerPtr scorer = bundle_of(cache, config.model);
      const bool diff = method == Method::kWaitIfDiff;
      for (size_t s0 : config.s0_list) {
        for (size_t delta : config.delta_list) {
          BaselineConfig baseline{s0, delta};
          grid.push_back(GridPoint{
              "s0=" + std::to_string(s0) + ";delta=" + std::to_string(delta),
              [&config, scorer, baseline, diff](const Sentence& source) {
                SentenceStream stream(source);
                return diff ? wait_if_diff_decode(*scorer, baseline, stream,
                                                  limits_for(config, source))
                            : wait_if_worse_decode(*scorer, baseline, stream,
                                                   limits_for(config, source));
              }});
        }
      }
      break;
    }
  }
  return grid;
}

std::vector<DecodeOutcome> decode_corpus(const GridPoint& point, const Corpus& corpus,
                                         size_t jobs) {
  std::vector<DecodeOutcome> outcomes(corpus.size());
  parallel_for(corpus.size(), jobs, [&](size_t i) { outcomes[i] = point.decode(corpus.sources[i]); });
  return outcomes;
}

}  // namespace

std::vector<RunRecord> run_sweep(const SweepConfig& config, const Corpus& corpus) {
  if (corpus.size() == 0) throw DataError("sweep requires a non-empty corpus");
  for (const auto& refs : corpus.reference_sets) {
    if (refs.empty()) throw DataError("sweep requires references for every sentence");
  }
  const ScorerCache cache = build_scorers(config);
  const std::vector<GridPoint> grid = build_grid(config, cache);

  std::vector<RunRecord> records;
  records.reserve(grid.size());
  for (const GridPoint& point : grid) {
    const std::string identity = method_name(*config.method) + "[" + point.params + "]";
    try {
      std::vector<DecodeOutcome> outcomes = decode_corpus(point, corpus, config.jobs);

      std::vector<Sentence> hypotheses;
      hypotheses.reserve(outcomes.size());
      for (const DecodeOutcome& outcome : outcomes) {
        hypotheses.push_back(outcome.hypothesis.without_marker());
      }

      double al_sum = 0.0;
      size_t al_count = 0;
      for (size_t i = 0; i < outcomes.size(); ++i) {
        const size_t source_len = corpus.sources[i].unmarked_size();
        const size_t hyp_len = hypotheses[i].size();
        if (source_len == 0 || hyp_len == 0) continue;  // AL undefined
        al_sum += average_lagging(outcomes[i].trace, source_len, hyp_len).al;
        ++al_count;
      }

      double seconds = 0.0;
      size_t writes = 0;
      for (const DecodeOutcome& outcome : outcomes) {
        for (double s : outcome.elapsed_per_write) {
          seconds += s;
          ++writes;
        }
      }

      RunRecord record;
      record.method = method_name(*config.method);
      record.params = point.params;
      record.bleu = corpus_bleu(hypotheses, corpus.reference_sets).bleu;
      record.al = al_count > 0 ? al_sum / static_cast<double>(al_count) : 0.0;
      record.sentences = corpus.size();
      record.sec_per_token = writes > 0 ? seconds / static_cast<double>(writes) : 0.0;
      records.push_back(std::move(record));
    } catch (const ConfigError& e) {
      throw ConfigError("grid point " + identity + ": " + e.what());
    } catch (const Error& e) {
      throw DataError("grid point " + identity + ": " + e.what());
    }
  }
  return records;
}

std::vector<DecodeOutcome> run_decode(const SweepConfig& config, const Corpus& corpus) {
  if (corpus.size() == 0) throw DataError("decode requires a non-empty corpus");
  const ScorerCache cache = build_scorers(config);
  const std::vector<GridPoint> grid = build_grid(config, cache);
  return decode_corpus(grid.front(), corpus, config.jobs);
}

void emit_report(const std::vector<RunRecord>& records, std::ostream& out) {
  if (records.empty()) throw ArgumentError("emit_report requires at least one record");
  out << "method,params,bleu,al,sentences,sec_per_token\n";
  char buffer[128];
  for (const RunRecord& record : records) {
    std::snprintf(buffer, sizeof(buffer), "%.2f,%.3f,%zu,%.4f", record.bleu, record.al,
                  record.sentences, record.sec_per_token);
    out << record.method << ',' << record.params << ',' << buffer << '\n';
  }
}

void emit_report(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report: " + path);
  emit_report(records, out);
  if (!out) throw IoError("failed while writing report: " + path);
}

std::vector<RunRecord> read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty report");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "method,params,bleu,al,sentences,sec_per_token") {
    throw DataError(path + ": unexpected report header '" + line + "'");
  }
  std::vector<RunRecord> records;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string field;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 6) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 6 fields, got " +
                      std::to_string(fields.size()));
    }
    try {
      RunRecord record;
      record.method = fields[0];
      record.params = fields[1];
      record.bleu = std::stod(fields[2]);
      record.al = std::stod(fields[3]);
      record.sentences = static_cast<size_t>(std::stoull(fields[4]));
      record.sec_per_token = std::stod(fields[5]);
      records.push_back(std::move(record));
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": bad numeric field");
    }
  }
  return records;
}

std::vector<RunRecord> merge_reports(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ArgumentError("merge_reports requires at least one input");
  std::vector<RunRecord> merged;
  for (const std::string& path : paths) {
    auto records = read_report(path);
    merged.insert(merged.end(), std::make_move_iterator(records.begin()),
                  std::make_move_iterator(records.end()));
  }
  return merged;
}

EvalMatrix run_eval_matrix(const SweepConfig& config, const Corpus& corpus) {
  if (config.models.empty()) throw ConfigError("eval-matrix requires a [models] registry");
  if (config.matrix_policies.empty()) throw ConfigError("eval-matrix requires [matrix] policies");
  const ScorerCache cache = build_scorers(config);

  std::vector<ModelEntry> entries;
  entries.reserve(config.models.size());
  for (const auto& [id, spec] : config.models) {
    size_t trained_k = std::numeric_limits<size_t>::max();
    size_t digits = id.size();
    while (digits > 0 && std::isdigit(static_cast<unsigned char>(id[digits - 1]))) --digits;
    if (digits < id.size()) trained_k = parse_size(id.substr(digits), "model id " + id);
    entries.push_back(ModelEntry{id, trained_k, cache.find(spec)});
  }

  MatrixOptions options;
  options.catchup_every = config.catchup_every;
  options.max_len_cap = config.max_len_cap;
  options.jobs = config.jobs;
  return evaluate_matrix(entries, config.matrix_policies, corpus, options);
}

void write_ensemble_selection(const EvalMatrix& matrix, size_t top_n, std::ostream& out) {
  out << "[ensemble]\n";
  for (size_t policy_k : matrix.policies()) {
    const auto ids = select_top_n(matrix, policy_k, top_n);
    out << 'k' << policy_k << " = ";
    for (size_t i = 0; i < ids.size(); ++i) {
      if (i > 0) out << ',';
      out << ids[i];
    }
    out << '\n';
  }
}

}  // namespace simuldec
