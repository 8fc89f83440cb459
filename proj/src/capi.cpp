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

#include "simuldec.h"

#include <fstream>
#include <string>
#include <vector>

#include "harness.hpp"

using namespace simuldec;

struct sd_config {
  SweepConfig config;
};

struct sd_corpus {
  Corpus corpus;
};

struct sd_decode_result {
  std::vector<std::string> hypotheses;
  std::vector<std::string> traces;
  std::vector<std::vector<double>> confidences;
  std::vector<bool> truncated;
};

namespace {

thread_local std::string g_last_error;

sd_status fail(sd_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
sd_status guarded(Fn&& fn) {
  try {
    fn();
    return SD_OK;
  } catch (const ConfigError& e) {
    return fail(SD_ERR_CONFIG, e.what());
  } catch (const IoError& e) {
    return fail(SD_ERR_DATA, e.what());
  } catch (const Error& e) {
    // Argument, data and vocabulary problems all stem from user-supplied
    // files at this boundary.
    return fail(SD_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(SD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SD_ERR_INTERNAL, "unknown error");
  }
}

}  // namespace

extern "C" {

const char* sd_version(void) { return "0.1.0"; }

const char* sd_status_name(sd_status status) {
  switch (status) {
    case SD_OK:
      return "ok";
    case SD_ERR_CONFIG:
      return "config error";
    case SD_ERR_DATA:
      return "data error";
    case SD_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* sd_last_error(void) { return g_last_error.c_str(); }

sd_status sd_config_open(const char* path, sd_config** out) {
  if (!path || !out) return fail(SD_ERR_CONFIG, "sd_config_open: null argument");
  *out = nullptr;
  return guarded([&] { *out = new sd_config{SweepConfig::load(path)}; });
}

void sd_config_close(sd_config* config) { delete config; }

void sd_config_set_seed(sd_config* config, unsigned long long seed) {
  if (config) config->config.seed = seed;
}

void sd_config_set_jobs(sd_config* config, unsigned jobs) {
  if (config && jobs > 0) config->config.jobs = jobs;
}

sd_status sd_corpus_open(const char* source_path, const char* const* reference_paths,
                         size_t reference_count, sd_corpus** out) {
  if (!source_path || !out || (reference_count > 0 && !reference_paths)) {
    return fail(SD_ERR_CONFIG, "sd_corpus_open: null argument");
  }
  *out = nullptr;
  return guarded([&] {
    std::vector<std::string> refs(reference_paths, reference_paths + reference_count);
    *out = new sd_corpus{load_corpus(source_path, refs)};
  });
}

void sd_corpus_close(sd_corpus* corpus) { delete corpus; }

size_t sd_corpus_size(const sd_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

sd_status sd_decode_run(const sd_config* config, const sd_corpus* corpus,
                        sd_decode_result** out) {
  if (!config || !corpus || !out) return fail(SD_ERR_CONFIG, "sd_decode_run: null argument");
  *out = nullptr;
  return guarded([&] {
    auto outcomes = run_decode(config->config, corpus->corpus);
    auto* result = new sd_decode_result;
    result->hypotheses.reserve(outcomes.size());
    for (DecodeOutcome& outcome : outcomes) {
      result->hypotheses.push_back(outcome.hypothesis.joined());
      result->traces.push_back(outcome.trace.to_string());
      result->confidences.push_back(std::move(outcome.confidences));
      result->truncated.push_back(outcome.truncated);
    }
    *out = result;
  });
}

size_t sd_result_count(const sd_decode_result* result) {
  return result ? result->hypotheses.size() : 0;
}

const char* sd_result_hypothesis(const sd_decode_result* result, size_t index) {
  if (!result || index >= result->hypotheses.size()) return nullptr;
  return result->hypotheses[index].c_str();
}

const char* sd_result_trace(const sd_decode_result* result, size_t index) {
  if (!result || index >= result->traces.size()) return nullptr;
  return result->traces[index].c_str();
}

const double* sd_result_confidences(const sd_decode_result* result, size_t index, size_t* count) {
  if (count) *count = 0;
  if (!result || index >= result->confidences.size()) return nullptr;
  if (count) *count = result->confidences[index].size();
  return result->confidences[index].data();
}

int sd_result_truncated(const sd_decode_result* result, size_t index) {
  if (!result || index >= result->truncated.size()) return 0;
  return result->truncated[index] ? 1 : 0;
}

void sd_result_close(sd_decode_result* result) { delete result; }

sd_status sd_sweep_run(const sd_config* config, const sd_corpus* corpus, const char* out_csv_path,
                       int with_timing) {
  if (!config || !corpus || !out_csv_path) {
    return fail(SD_ERR_CONFIG, "sd_sweep_run: null argument");
  }
  return guarded([&] {
    std::vector<RunRecord> records = run_sweep(config->config, corpus->corpus);
    if (!with_timing) {
      for (RunRecord& record : records) record.sec_per_token = 0.0;
    }
    emit_report(records, std::string(out_csv_path));
  });
}

sd_status sd_eval_matrix_run(const sd_config* config, const sd_corpus* corpus,
                             const char* out_csv_path) {
  if (!config || !corpus || !out_csv_path) {
    return fail(SD_ERR_CONFIG, "sd_eval_matrix_run: null argument");
  }
  return guarded([&] {
    EvalMatrix matrix = run_eval_matrix(config->config, corpus->corpus);
    std::ofstream out(out_csv_path, std::ios::binary);
    if (!out) throw IoError("cannot write matrix: " + std::string(out_csv_path));
    matrix.write_csv(out);
  });
}

sd_status sd_select_ensemble(const char* matrix_csv_path, size_t top_n, const char* out_path) {
  if (!matrix_csv_path || !out_path) {
    return fail(SD_ERR_CONFIG, "sd_select_ensemble: null argument");
  }
  return guarded([&] {
    std::ifstream in(matrix_csv_path);
    if (!in) throw IoError("cannot open matrix: " + std::string(matrix_csv_path));
    EvalMatrix matrix = EvalMatrix::read_csv(in, matrix_csv_path);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot write selection: " + std::string(out_path));
    write_ensemble_selection(matrix, top_n, out);
  });
}

sd_status sd_report_merge(const char* const* report_paths, size_t report_count,
                          const char* out_csv_path) {
  if (!report_paths || report_count == 0 || !out_csv_path) {
    return fail(SD_ERR_CONFIG, "sd_report_merge: need at least one input and an output path");
  }
  return guarded([&] {
    std::vector<std::string> paths(report_paths, report_paths + report_count);
    emit_report(merge_reports(paths), std::string(out_csv_path));
  });
}

}  // extern "C"
