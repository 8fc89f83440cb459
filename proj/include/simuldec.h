/* Copyright 2026 The simuldec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the simuldec streaming decoding engine.
 *
 * All functions returning sd_status leave a human-readable message for the
 * calling thread, retrievable with sd_last_error(), when they fail. Handles
 * are opaque; every *_open call pairs with the matching *_close. Handles are
 * immutable after creation (except for the sd_config_set_* overrides) and
 * may be shared across threads.
 */

#ifndef SIMULDEC_H
#define SIMULDEC_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32 || defined __CYGWIN__
#define SD_API __declspec(dllexport)
#else
#define SD_API __attribute__((visibility("default")))
#endif

typedef enum sd_status {
  SD_OK = 0,
  SD_ERR_CONFIG = 1,  /* configuration / usage problems */
  SD_ERR_DATA = 2,    /* missing or malformed data files */
  SD_ERR_INTERNAL = 3 /* unexpected failure */
} sd_status;

typedef struct sd_config sd_config;
typedef struct sd_corpus sd_corpus;
typedef struct sd_decode_result sd_decode_result;

SD_API const char* sd_version(void);
SD_API const char* sd_status_name(sd_status status);

/* Message of this thread's most recent failure; "" when none occurred. The
 * pointer stays valid until the next failing call on the same thread. */
SD_API const char* sd_last_error(void);

/* Parses and validates a sectioned key-value config file (see
 * docs/config.md). Scorer paths resolve relative to the config file. */
SD_API sd_status sd_config_open(const char* path, sd_config** out);
SD_API void sd_config_close(sd_config* config);

/* Override the config's seed / worker count (CLI flags use these). */
SD_API void sd_config_set_seed(sd_config* config, unsigned long long seed);
SD_API void sd_config_set_jobs(sd_config* config, unsigned jobs);

/* Loads a source file and zero or more reference files, one whitespace-
 * tokenized sentence per line, all with equal line counts. */
SD_API sd_status sd_corpus_open(const char* source_path, const char* const* reference_paths,
                                size_t reference_count, sd_corpus** out);
SD_API void sd_corpus_close(sd_corpus* corpus);
SD_API size_t sd_corpus_size(const sd_corpus* corpus);

/* Decodes every corpus sentence at the config's first grid point. */
SD_API sd_status sd_decode_run(const sd_config* config, const sd_corpus* corpus,
                               sd_decode_result** out);
SD_API size_t sd_result_count(const sd_decode_result* result);
/* Space-joined hypothesis tokens, end marker included when one was written. */
SD_API const char* sd_result_hypothesis(const sd_decode_result* result, size_t index);
/* The decode's actions as "R W R R W W". */
SD_API const char* sd_result_trace(const sd_decode_result* result, size_t index);
/* Per-WRITE confidences; *count receives the length. */
SD_API const double* sd_result_confidences(const sd_decode_result* result, size_t index,
                                           size_t* count);
SD_API int sd_result_truncated(const sd_decode_result* result, size_t index);
SD_API void sd_result_close(sd_decode_result* result);

/* Runs the configured sweep over the corpus and writes the report CSV
 * (header method,params,bleu,al,sentences,sec_per_token). With
 * with_timing == 0 the sec_per_token column is written as 0.0000 so that
 * identical configs yield byte-identical files. */
SD_API sd_status sd_sweep_run(const sd_config* config, const sd_corpus* corpus,
                              const char* out_csv_path, int with_timing);

/* Scores every [models] entry under every [matrix] policy and writes the
 * matrix CSV (header model,policy_k,bleu). */
SD_API sd_status sd_eval_matrix_run(const sd_config* config, const sd_corpus* corpus,
                                    const char* out_csv_path);

/* Reads a matrix CSV and writes an [ensemble] config fragment with the
 * top_n models per policy. */
SD_API sd_status sd_select_ensemble(const char* matrix_csv_path, size_t top_n,
                                    const char* out_path);

/* Concatenates report CSVs, validating their schema. */
SD_API sd_status sd_report_merge(const char* const* report_paths, size_t report_count,
                                 const char* out_csv_path);

#ifdef __cplusplus
}
#endif

#endif /* SIMULDEC_H */
