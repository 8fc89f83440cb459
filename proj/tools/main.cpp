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

// Command-line front end. Everything below talks to the engine through the
// C API in simuldec.h only.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simuldec.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

int exit_code_for(sd_status status) {
  switch (status) {
    case SD_OK:
      return kExitOk;
    case SD_ERR_CONFIG:
      return kExitUsage;
    default:
      return kExitData;
  }
}

int report_failure(sd_status status) {
  std::cerr << "simuldec: " << sd_status_name(status) << ": " << sd_last_error() << "\n";
  return exit_code_for(status);
}

struct ConfigHandle {
  sd_config* ptr = nullptr;
  ~ConfigHandle() { sd_config_close(ptr); }
};

struct CorpusHandle {
  sd_corpus* ptr = nullptr;
  ~CorpusHandle() { sd_corpus_close(ptr); }
};

struct ResultHandle {
  sd_decode_result* ptr = nullptr;
  ~ResultHandle() { sd_result_close(ptr); }
};

struct CommonArgs {
  std::string config_path;
  std::string source_path;
  std::vector<std::string> reference_paths;
  std::string out_path;
  unsigned long long seed = 0;
  bool seed_set = false;
  unsigned jobs = 0;
};

void add_common_flags(CLI::App* cmd, CommonArgs* args, bool need_config, bool need_source) {
  auto* config = cmd->add_option("--config", args->config_path, "Config file path");
  if (need_config) config->required();
  auto* source = cmd->add_option("--source", args->source_path, "Source corpus, one sentence per line");
  if (need_source) source->required();
  cmd->add_option("--refs", args->reference_paths, "Reference file(s), comma separated")
      ->delimiter(',');
  cmd->add_option("--out", args->out_path, "Output path");
  cmd->add_option("--seed", args->seed, "Seed override")->each([args](const std::string&) {
    args->seed_set = true;
  });
  cmd->add_option("--jobs", args->jobs, "Worker threads for corpus decoding");
}

sd_status open_config(const CommonArgs& args, ConfigHandle* config) {
  sd_status status = sd_config_open(args.config_path.c_str(), &config->ptr);
  if (status != SD_OK) return status;
  if (args.seed_set) sd_config_set_seed(config->ptr, args.seed);
  if (args.jobs > 0) sd_config_set_jobs(config->ptr, args.jobs);
  return SD_OK;
}

sd_status open_corpus(const CommonArgs& args, CorpusHandle* corpus) {
  std::vector<const char*> refs;
  refs.reserve(args.reference_paths.size());
  for (const std::string& path : args.reference_paths) refs.push_back(path.c_str());
  return sd_corpus_open(args.source_path.c_str(), refs.empty() ? nullptr : refs.data(),
                        refs.size(), &corpus->ptr);
}

int cmd_decode(const CommonArgs& args) {
  ConfigHandle config;
  CorpusHandle corpus;
  ResultHandle result;
  sd_status status = open_config(args, &config);
  if (status == SD_OK) status = open_corpus(args, &corpus);
  if (status == SD_OK) status = sd_decode_run(config.ptr, corpus.ptr, &result.ptr);
  if (status != SD_OK) return report_failure(status);

  std::ofstream file;
  if (!args.out_path.empty()) {
    file.open(args.out_path, std::ios::binary);
    if (!file) {
      std::cerr << "simuldec: cannot write " << args.out_path << "\n";
      return kExitData;
    }
  }
  std::ostream& out = args.out_path.empty() ? std::cout : file;

  char buffer[32];
  for (size_t i = 0; i < sd_result_count(result.ptr); ++i) {
    if (i > 0) out << "\n";
    out << "hyp\t" << sd_result_hypothesis(result.ptr, i) << "\n";
    out << "trace\t" << sd_result_trace(result.ptr, i) << "\n";
    out << "conf\t";
    size_t count = 0;
    const double* confidences = sd_result_confidences(result.ptr, i, &count);
    for (size_t c = 0; c < count; ++c) {
      std::snprintf(buffer, sizeof(buffer), "%.6f", confidences[c]);
      out << (c > 0 ? " " : "") << buffer;
    }
    out << "\n";
    if (sd_result_truncated(result.ptr, i)) out << "truncated\t1\n";
  }
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, bool with_timing) {
  ConfigHandle config;
  CorpusHandle corpus;
  sd_status status = open_config(args, &config);
  if (status == SD_OK) status = open_corpus(args, &corpus);
  if (status == SD_OK) {
    status = sd_sweep_run(config.ptr, corpus.ptr, args.out_path.c_str(), with_timing ? 1 : 0);
  }
  if (status != SD_OK) return report_failure(status);
  return kExitOk;
}

int cmd_eval_matrix(const CommonArgs& args) {
  ConfigHandle config;
  CorpusHandle corpus;
  sd_status status = open_config(args, &config);
  if (status == SD_OK) status = open_corpus(args, &corpus);
  if (status == SD_OK) status = sd_eval_matrix_run(config.ptr, corpus.ptr, args.out_path.c_str());
  if (status != SD_OK) return report_failure(status);
  return kExitOk;
}

int cmd_select_ensemble(const std::string& matrix_path, size_t top_n, const std::string& out) {
  sd_status status = sd_select_ensemble(matrix_path.c_str(), top_n, out.c_str());
  if (status != SD_OK) return report_failure(status);
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<const char*> paths;
  paths.reserve(inputs.size());
  for (const std::string& path : inputs) paths.push_back(path.c_str());
  sd_status status = sd_report_merge(paths.data(), paths.size(), out.c_str());
  if (status != SD_OK) return report_failure(status);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simuldec: streaming simultaneous decoding and evaluation"};
  app.set_version_flag("--version", std::string(sd_version()));
  app.require_subcommand(1);

  CommonArgs decode_args;
  CLI::App* decode = app.add_subcommand("decode", "Decode a corpus; print hypothesis, trace and confidences");
  add_common_flags(decode, &decode_args, true, true);

  CommonArgs sweep_args;
  bool with_timing = false;
  CLI::App* sweep = app.add_subcommand("sweep", "Run the configured parameter sweep, write the report CSV");
  add_common_flags(sweep, &sweep_args, true, true);
  sweep->get_option("--out")->required();
  sweep->get_option("--refs")->required();
  sweep->add_flag("--timing", with_timing,
                  "Include measured sec_per_token (off by default: timings vary run to run)");

  CommonArgs matrix_args;
  CLI::App* matrix = app.add_subcommand("eval-matrix", "Score every model under every policy, write the matrix CSV");
  add_common_flags(matrix, &matrix_args, true, true);
  matrix->get_option("--out")->required();
  matrix->get_option("--refs")->required();

  std::string matrix_path;
  size_t top_n = 3;
  CommonArgs select_args;
  CLI::App* select = app.add_subcommand("select-ensemble", "Pick the top-n models per policy from a matrix CSV");
  select->add_option("matrix", matrix_path, "Matrix CSV from eval-matrix")->required();
  select->add_option("--top", top_n, "How many models to keep per policy");
  select->add_option("--out", select_args.out_path, "Output config fragment")->required();

  std::vector<std::string> report_inputs;
  CommonArgs report_args;
  CLI::App* report = app.add_subcommand("report", "Merge and reformat report CSVs");
  report->add_option("inputs", report_inputs, "Report CSVs to merge")->required();
  report->add_option("--out", report_args.out_path, "Merged report path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    std::cerr << "simuldec: " << e.what() << "\n";
    return kExitUsage;
  }

  if (decode->parsed()) return cmd_decode(decode_args);
  if (sweep->parsed()) return cmd_sweep(sweep_args, with_timing);
  if (matrix->parsed()) return cmd_eval_matrix(matrix_args);
  if (select->parsed()) return cmd_select_ensemble(matrix_path, top_n, select_args.out_path);
  if (report->parsed()) return cmd_report(report_inputs, report_args.out_path);
  return kExitUsage;
}
