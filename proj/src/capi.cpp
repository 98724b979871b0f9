// Copyright 2026 The FastGCL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fastgcl/fastgcl.h"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

struct fgcl_config {
  std::string text;
  std::string origin;
  std::vector<fastgcl::Override> overrides;
  fastgcl::RunConfig resolved;
};

struct fgcl_graph {
  fastgcl::Graph graph;
};

namespace {

thread_local std::string t_last_error;

#ifndef FASTGCL_VERSION
#define FASTGCL_VERSION "0.0.0"
#endif

template <typename F>
fgcl_status guarded(F&& body) noexcept {
  t_last_error.clear();
  try {
    return body();
  } catch (const fastgcl::Error& e) {
    t_last_error = e.what();
    return static_cast<fgcl_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return FGCL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return FGCL_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return FGCL_ERR_INTERNAL;
  }
}

fgcl_status invalid(const char* what) {
  t_last_error = what;
  return FGCL_ERR_INVALID_ARGUMENT;
}

fgcl_status make_config(std::string text, std::string origin, fgcl_config** out) {
  auto cfg = std::make_unique<fgcl_config>();
  cfg->resolved = fastgcl::parse_run_config(text, {}, origin);
  cfg->text = std::move(text);
  cfg->origin = std::move(origin);
  *out = cfg.release();
  return FGCL_OK;
}

}  // namespace

extern "C" {

const char* fgcl_version(void) { return FASTGCL_VERSION; }

const char* fgcl_last_error(void) { return t_last_error.c_str(); }

const char* fgcl_status_name(fgcl_status status) {
  switch (status) {
    case FGCL_OK: return "ok";
    case FGCL_ERR_INTERNAL: return "internal";
    case FGCL_ERR_CONFIG: return "config";
    case FGCL_ERR_NON_FINITE: return "non_finite";
    case FGCL_ERR_IO: return "io";
    case FGCL_ERR_CHECKPOINT: return "checkpoint";
    case FGCL_ERR_GRADCHECK: return "gradcheck";
    case FGCL_ERR_PRECONDITION: return "precondition";
    case FGCL_ERR_SWEEP: return "sweep";
    case FGCL_ERR_INVALID_ARGUMENT: return "invalid_argument";
  }
  return "unknown";
}

void fgcl_set_log_callback(fgcl_log_fn fn, void* user_data) {
  if (!fn) {
    fastgcl::set_log_sink({});
    return;
  }
  fastgcl::set_log_sink([fn, user_data](fastgcl::LogLevel level, const std::string& msg) {
    fn(static_cast<fgcl_log_level>(static_cast<int>(level)), msg.c_str(), user_data);
  });
}

fgcl_status fgcl_config_load(const char* path, fgcl_config** out) {
  if (!path || !out) return invalid("fgcl_config_load: null argument");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) fastgcl::fail(fastgcl::ErrorCode::kConfig, fmt::format("cannot open config file '{}'", path));
    std::stringstream text;
    text << in.rdbuf();
    return make_config(text.str(), path, out);
  });
}

fgcl_status fgcl_config_parse(const char* toml_text, fgcl_config** out) {
  if (!toml_text || !out) return invalid("fgcl_config_parse: null argument");
  return guarded([&] { return make_config(toml_text, "<string>", out); });
}

fgcl_status fgcl_config_set(fgcl_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid("fgcl_config_set: null argument");
  return fgcl_config_set_many(cfg, &key, &value, 1);
}

fgcl_status fgcl_config_set_many(fgcl_config* cfg, const char* const* keys, const char* const* values,
                                 size_t count) {
  if (!cfg || (count > 0 && (!keys || !values))) return invalid("fgcl_config_set_many: null argument");
  for (size_t i = 0; i < count; ++i)
    if (!keys[i] || !values[i]) return invalid("fgcl_config_set_many: null key or value");
  return guarded([&] {
    auto overrides = cfg->overrides;
    for (size_t i = 0; i < count; ++i) overrides.emplace_back(keys[i], values[i]);
    cfg->resolved = fastgcl::parse_run_config(cfg->text, overrides, cfg->origin);
    cfg->overrides = std::move(overrides);
    return FGCL_OK;
  });
}

void fgcl_config_free(fgcl_config* cfg) { delete cfg; }

fgcl_status fgcl_cmd_train(const fgcl_config* cfg) {
  if (!cfg) return invalid("fgcl_cmd_train: null config");
  return guarded([&] {
    fastgcl::cmd_train(cfg->resolved);
    return FGCL_OK;
  });
}

fgcl_status fgcl_cmd_eval(const fgcl_config* cfg, const char* checkpoint, const char* baseline) {
  if (!cfg) return invalid("fgcl_cmd_eval: null config");
  return guarded([&] {
    fastgcl::cmd_eval(cfg->resolved, checkpoint ? checkpoint : "", baseline ? baseline : "");
    return FGCL_OK;
  });
}

fgcl_status fgcl_cmd_gradcheck(const fgcl_config* cfg, int corrupt_adjoints, double* max_rel_error) {
  if (!cfg) return invalid("fgcl_cmd_gradcheck: null config");
#ifndef FASTGCL_TEST_HOOKS
  if (corrupt_adjoints) return invalid("adjoint corruption is only available in builds with test hooks");
#endif
  return guarded([&] {
    const auto r = fastgcl::cmd_gradcheck(cfg->resolved, corrupt_adjoints != 0);
    if (max_rel_error) *max_rel_error = r.max_rel_error;
    if (!(r.max_rel_error < fastgcl::kGradCheckThreshold)) {
      t_last_error = fmt::format("max relative error {:.3e} is not below {:.0e}", r.max_rel_error,
                                 fastgcl::kGradCheckThreshold);
      return FGCL_ERR_GRADCHECK;
    }
    return FGCL_OK;
  });
}

fgcl_status fgcl_cmd_sweep(const fgcl_config* cfg) {
  if (!cfg) return invalid("fgcl_cmd_sweep: null config");
  return guarded([&] {
    fastgcl::cmd_sweep(cfg->resolved);
    return FGCL_OK;
  });
}

fgcl_status fgcl_cmd_gen_data(const fgcl_config* cfg, const char* out_dir) {
  if (!cfg || !out_dir) return invalid("fgcl_cmd_gen_data: null argument");
  return guarded([&] {
    fastgcl::cmd_gen_data(cfg->resolved, out_dir);
    return FGCL_OK;
  });
}

fgcl_status fgcl_graph_load(const char* dir, fgcl_graph** out) {
  if (!dir || !out) return invalid("fgcl_graph_load: null argument");
  return guarded([&] {
    *out = new fgcl_graph{fastgcl::load_graph(dir)};
    return FGCL_OK;
  });
}

fgcl_status fgcl_graph_generate_sbm(const size_t* block_sizes, size_t num_blocks, double p_in, double p_out,
                                    size_t feature_dim, double feature_signal, uint64_t seed, fgcl_graph** out) {
  if (!block_sizes || num_blocks == 0 || !out) return invalid("fgcl_graph_generate_sbm: null or empty argument");
  return guarded([&] {
    fastgcl::SbmSpec spec;
    spec.block_sizes.assign(block_sizes, block_sizes + num_blocks);
    spec.p_in = p_in;
    spec.p_out = p_out;
    spec.feature_dim = feature_dim;
    spec.feature_signal = feature_signal;
    spec.seed = seed;
    *out = new fgcl_graph{fastgcl::generate_sbm(spec)};
    return FGCL_OK;
  });
}

size_t fgcl_graph_num_nodes(const fgcl_graph* g) { return g ? g->graph.num_nodes() : 0; }
size_t fgcl_graph_num_edges(const fgcl_graph* g) { return g ? g->graph.num_edges() : 0; }
size_t fgcl_graph_feature_dim(const fgcl_graph* g) { return g ? g->graph.feature_dim() : 0; }

fgcl_status fgcl_graph_csr(const fgcl_graph* g, size_t* row_ptr, size_t* col_idx) {
  if (!g || !row_ptr || (!col_idx && g->graph.num_directed_edges() > 0)) return invalid("fgcl_graph_csr: null argument");
  const auto& rp = g->graph.row_ptr();
  const auto& ci = g->graph.col_idx();
  std::copy(rp.begin(), rp.end(), row_ptr);
  std::copy(ci.begin(), ci.end(), col_idx);
  t_last_error.clear();
  return FGCL_OK;
}

fgcl_status fgcl_graph_save(const fgcl_graph* g, const char* dir) {
  if (!g || !dir) return invalid("fgcl_graph_save: null argument");
  return guarded([&] {
    fastgcl::save_graph(g->graph, dir);
    return FGCL_OK;
  });
}

void fgcl_graph_free(fgcl_graph* g) { delete g; }

}  // extern "C"
