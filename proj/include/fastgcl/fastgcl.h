/*
 * Copyright 2026 The FastGCL Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * FastGCL C interface.
 *
 * Every fallible function returns an fgcl_status. On failure a message is
 * available from fgcl_last_error() on the calling thread until the next
 * call into the library from that thread. Status values double as the
 * exit codes of the `fastgcl` command-line tool.
 *
 * Handles are opaque and owned by the caller; release them with the
 * matching *_free function. Passing NULL to a *_free function is a no-op.
 */

#ifndef FASTGCL_FASTGCL_H_
#define FASTGCL_FASTGCL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FASTGCL_BUILDING_LIBRARY)
#define FGCL_API __declspec(dllexport)
#else
#define FGCL_API __declspec(dllimport)
#endif
#else
#define FGCL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fgcl_status {
  FGCL_OK = 0,
  FGCL_ERR_INTERNAL = 1,
  FGCL_ERR_CONFIG = 2,
  FGCL_ERR_NON_FINITE = 3,
  FGCL_ERR_IO = 4,
  FGCL_ERR_CHECKPOINT = 5,
  FGCL_ERR_GRADCHECK = 6,
  FGCL_ERR_PRECONDITION = 7,
  FGCL_ERR_SWEEP = 8,
  FGCL_ERR_INVALID_ARGUMENT = 9
} fgcl_status;

typedef enum fgcl_log_level { FGCL_LOG_INFO = 0, FGCL_LOG_WARN = 1, FGCL_LOG_ERROR = 2 } fgcl_log_level;

typedef struct fgcl_config fgcl_config;
typedef struct fgcl_graph fgcl_graph;

typedef void (*fgcl_log_fn)(fgcl_log_level level, const char* message, void* user_data);

FGCL_API const char* fgcl_version(void);
FGCL_API const char* fgcl_last_error(void);
FGCL_API const char* fgcl_status_name(fgcl_status status);

/* Routes library log lines to `fn`; NULL restores the default (stderr). */
FGCL_API void fgcl_set_log_callback(fgcl_log_fn fn, void* user_data);

/* ---- run configuration ------------------------------------------------ */

FGCL_API fgcl_status fgcl_config_load(const char* path, fgcl_config** out);
FGCL_API fgcl_status fgcl_config_parse(const char* toml_text, fgcl_config** out);

/* Sets `key` ("section.key" or a top-level key such as "seed") to `value`,
 * which is TOML value syntax; text that is not valid TOML is taken as a
 * string. The config is left unchanged on failure. */
FGCL_API fgcl_status fgcl_config_set(fgcl_config* cfg, const char* key, const char* value);
/* Applies `count` key/value pairs as one change, so settings that are only
 * valid together (a dataset kind and its path, say) can be made at once. */
FGCL_API fgcl_status fgcl_config_set_many(fgcl_config* cfg, const char* const* keys, const char* const* values,
                                          size_t count);
FGCL_API void fgcl_config_free(fgcl_config* cfg);

/* ---- commands ----------------------------------------------------------- */

FGCL_API fgcl_status fgcl_cmd_train(const fgcl_config* cfg);

/* `checkpoint` may be NULL (uses <output_dir>/params.ckpt). `baseline` may be
 * NULL, "none", "raw_feature", or "riu" (alias "riu_encoder"); a baseline skips
 * the checkpoint. */
FGCL_API fgcl_status fgcl_cmd_eval(const fgcl_config* cfg, const char* checkpoint, const char* baseline);

/* Returns FGCL_ERR_GRADCHECK when the error reaches the 1e-4 threshold.
 * `max_rel_error` may be NULL. A nonzero `corrupt_adjoints` deliberately
 * breaks one backward rule and is only accepted in builds with test hooks. */
FGCL_API fgcl_status fgcl_cmd_gradcheck(const fgcl_config* cfg, int corrupt_adjoints, double* max_rel_error);

FGCL_API fgcl_status fgcl_cmd_sweep(const fgcl_config* cfg);
FGCL_API fgcl_status fgcl_cmd_gen_data(const fgcl_config* cfg, const char* out_dir);

/* ---- graphs ------------------------------------------------------------- */

FGCL_API fgcl_status fgcl_graph_load(const char* dir, fgcl_graph** out);
FGCL_API fgcl_status fgcl_graph_generate_sbm(const size_t* block_sizes, size_t num_blocks, double p_in, double p_out,
                                             size_t feature_dim, double feature_signal, uint64_t seed,
                                             fgcl_graph** out);
FGCL_API size_t fgcl_graph_num_nodes(const fgcl_graph* g);
FGCL_API size_t fgcl_graph_num_edges(const fgcl_graph* g);
FGCL_API size_t fgcl_graph_feature_dim(const fgcl_graph* g);

/* Copies the CSR arrays. `row_ptr` must hold num_nodes + 1 entries and
 * `col_idx` 2 * num_edges entries. */
FGCL_API fgcl_status fgcl_graph_csr(const fgcl_graph* g, size_t* row_ptr, size_t* col_idx);
FGCL_API fgcl_status fgcl_graph_save(const fgcl_graph* g, const char* dir);
FGCL_API void fgcl_graph_free(fgcl_graph* g);

#ifdef __cplusplus
}
#endif

#endif /* FASTGCL_FASTGCL_H_ */
