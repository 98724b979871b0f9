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

#include "run_config.hpp"

#include <fmt/format.h>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <toml++/toml.hpp>

namespace fastgcl {

namespace {

struct BadValue {
  std::string why;
};

std::int64_t as_int(const toml::node& n) {
  if (auto v = n.value_exact<std::int64_t>()) return *v;
  throw BadValue{"expected an integer"};
}

std::size_t as_count(const toml::node& n) {
  const auto v = as_int(n);
  if (v < 0) throw BadValue{"expected a non-negative integer"};
  return static_cast<std::size_t>(v);
}

double as_real(const toml::node& n) {
  if (auto v = n.value_exact<double>()) return *v;
  if (auto v = n.value_exact<std::int64_t>()) return static_cast<double>(*v);
  throw BadValue{"expected a number"};
}

bool as_bool(const toml::node& n) {
  if (auto v = n.value_exact<bool>()) return *v;
  throw BadValue{"expected true or false"};
}

std::string as_string(const toml::node& n) {
  if (auto v = n.value_exact<std::string>()) return *v;
  throw BadValue{"expected a string"};
}

template <typename T, typename F>
std::vector<T> as_list(const toml::node& n, F elem) {
  const auto* arr = n.as_array();
  if (!arr) throw BadValue{"expected an array"};
  std::vector<T> out;
  for (const auto& e : *arr) out.push_back(elem(e));
  return out;
}

// Wraps a parse_* helper so that its Error surfaces as a BadValue.
template <typename F>
auto parsed(const toml::node& n, F parse) {
  try {
    return parse(as_string(n));
  } catch (const Error& e) {
    throw BadValue{e.what()};
  }
}

using Setter = std::function<void(RunConfig&, const toml::node&)>;

std::map<std::string, Setter> make_setters(bool& kind_set) {
  std::map<std::string, Setter> s;
  s["task"] = [](RunConfig& c, const toml::node& n) { c.task = parsed(n, parse_level); };
  s["seed"] = [](RunConfig& c, const toml::node& n) { c.seed = static_cast<std::uint64_t>(as_int(n)); };
  s["output_dir"] = [](RunConfig& c, const toml::node& n) { c.output_dir = as_string(n); };

  s["dataset.kind"] = [](RunConfig& c, const toml::node& n) {
    const auto k = as_string(n);
    if (k == "sbm") {
      c.dataset.kind = DatasetKind::kSbm;
    } else if (k == "motifs") {
      c.dataset.kind = DatasetKind::kMotifs;
    } else if (k == "path") {
      c.dataset.kind = DatasetKind::kPath;
    } else {
      throw BadValue{"expected sbm, motifs, or path"};
    }
  };
  s["dataset.path"] = [](RunConfig& c, const toml::node& n) {
    c.dataset.path = as_string(n);
    c.dataset.kind = DatasetKind::kPath;
  };
  s["dataset.seed"] = [](RunConfig& c, const toml::node& n) {
    c.dataset.seed = static_cast<std::uint64_t>(as_int(n));
  };
  s["dataset.block_sizes"] = [](RunConfig& c, const toml::node& n) {
    c.dataset.sbm.block_sizes = as_list<std::size_t>(n, as_count);
  };
  s["dataset.p_in"] = [](RunConfig& c, const toml::node& n) { c.dataset.sbm.p_in = as_real(n); };
  s["dataset.p_out"] = [](RunConfig& c, const toml::node& n) { c.dataset.sbm.p_out = as_real(n); };
  s["dataset.feature_dim"] = [](RunConfig& c, const toml::node& n) { c.dataset.sbm.feature_dim = as_count(n); };
  s["dataset.feature_signal"] = [](RunConfig& c, const toml::node& n) {
    c.dataset.sbm.feature_signal = as_real(n);
  };
  s["dataset.num_graphs"] = [](RunConfig& c, const toml::node& n) { c.dataset.motifs.num_graphs = as_count(n); };
  s["dataset.min_motifs"] = [](RunConfig& c, const toml::node& n) { c.dataset.motifs.min_motifs = as_count(n); };
  s["dataset.max_motifs"] = [](RunConfig& c, const toml::node& n) { c.dataset.motifs.max_motifs = as_count(n); };
  s["dataset.noise_edges"] = [](RunConfig& c, const toml::node& n) { c.dataset.motifs.noise_edges = as_count(n); };

  s["encoder.kind"] = [&kind_set](RunConfig& c, const toml::node& n) {
    c.encoder.kind = parsed(n, parse_encoder_kind);
    kind_set = true;
  };
  s["encoder.num_layers"] = [](RunConfig& c, const toml::node& n) { c.encoder.num_layers = as_count(n); };
  s["encoder.hidden_dim"] = [](RunConfig& c, const toml::node& n) { c.encoder.hidden_dim = as_count(n); };
  s["encoder.activation"] = [](RunConfig& c, const toml::node& n) {
    c.encoder.activation = parsed(n, parse_activation);
  };
  s["encoder.gin_eps"] = [](RunConfig& c, const toml::node& n) { c.encoder.gin_eps = as_real(n); };
  s["encoder.gin_train_eps"] = [](RunConfig& c, const toml::node& n) { c.encoder.gin_train_eps = as_bool(n); };
  s["encoder.mlp_hidden"] = [](RunConfig& c, const toml::node& n) { c.encoder.mlp_hidden = as_count(n); };

  s["train.epochs"] = [](RunConfig& c, const toml::node& n) { c.train.epochs = as_count(n); };
  s["train.lr"] = [](RunConfig& c, const toml::node& n) { c.train.lr = as_real(n); };
  s["train.weight_decay"] = [](RunConfig& c, const toml::node& n) { c.train.weight_decay = as_real(n); };
  s["train.lambda"] = [](RunConfig& c, const toml::node& n) { c.train.lambda = as_real(n); };
  s["train.batch_size"] = [](RunConfig& c, const toml::node& n) { c.train.batch_size = as_count(n); };
  s["train.ablation"] = [](RunConfig& c, const toml::node& n) {
    c.train.ablation = parsed(n, parse_edge_weight_mode);
  };
  s["train.log_every"] = [](RunConfig& c, const toml::node& n) { c.train.log_every = as_count(n); };
  s["train.resample_random"] = [](RunConfig& c, const toml::node& n) { c.train.resample_random = as_bool(n); };
  s["train.record_timing"] = [](RunConfig& c, const toml::node& n) { c.record_timing = as_bool(n); };

  s["eval.train_frac"] = [](RunConfig& c, const toml::node& n) { c.eval.split.train_frac = as_real(n); };
  s["eval.val_frac"] = [](RunConfig& c, const toml::node& n) { c.eval.split.val_frac = as_real(n); };
  s["eval.test_frac"] = [](RunConfig& c, const toml::node& n) { c.eval.split.test_frac = as_real(n); };
  s["eval.num_repeats"] = [](RunConfig& c, const toml::node& n) { c.eval.split.num_repeats = as_count(n); };
  s["eval.folds"] = [](RunConfig& c, const toml::node& n) { c.eval.folds = as_count(n); };
  s["eval.l2_grid"] = [](RunConfig& c, const toml::node& n) { c.eval.l2_grid = as_list<double>(n, as_real); };
  s["eval.probe_max_iters"] = [](RunConfig& c, const toml::node& n) { c.eval.probe.max_iters = as_count(n); };
  s["eval.probe_tol"] = [](RunConfig& c, const toml::node& n) { c.eval.probe.tol = as_real(n); };
  s["eval.probe_lr"] = [](RunConfig& c, const toml::node& n) { c.eval.probe.lr = as_real(n); };

  s["sweep.hidden_dim"] = [](RunConfig& c, const toml::node& n) {
    c.sweep.hidden_dim = as_list<std::size_t>(n, as_count);
  };
  s["sweep.num_layers"] = [](RunConfig& c, const toml::node& n) {
    c.sweep.num_layers = as_list<std::size_t>(n, as_count);
  };
  s["sweep.lambda"] = [](RunConfig& c, const toml::node& n) { c.sweep.lambda = as_list<double>(n, as_real); };
  s["sweep.ablation"] = [](RunConfig& c, const toml::node& n) {
    c.sweep.ablation = as_list<EdgeWeightMode>(n, [](const toml::node& e) { return parsed(e, parse_edge_weight_mode); });
  };

  s["gradcheck.eps"] = [](RunConfig& c, const toml::node& n) { c.gradcheck_eps = as_real(n); };
  return s;
}

toml::table parse_toml(std::string_view text, std::string_view origin) {
  try {
    return toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    fail(ErrorCode::kConfig,
         fmt::format("{}:{}:{}: {}", origin, where.line, where.column, std::string(e.description())));
  }
}

void apply_override(toml::table& root, const Override& ov) {
  const auto& [key, text] = ov;
  if (key.empty()) fail(ErrorCode::kConfig, "empty override key");
  toml::table holder;
  try {
    holder = toml::parse("v = " + text);
  } catch (const toml::parse_error&) {
    holder.insert_or_assign("v", text);
  }
  const auto dot = key.find('.');
  toml::table* target = &root;
  std::string leaf = key;
  if (dot != std::string::npos) {
    const std::string section = key.substr(0, dot);
    leaf = key.substr(dot + 1);
    if (!root.contains(section)) root.insert(section, toml::table{});
    target = root[section].as_table();
    if (!target) fail(ErrorCode::kConfig, fmt::format("config key '{}' is not a table", section));
  }
  target->insert_or_assign(leaf, *holder.get("v"));
}

}  // namespace

std::vector<ProbeConfig> EvalConfig::grid() const {
  std::vector<ProbeConfig> out;
  for (double l2 : l2_grid) {
    ProbeConfig p = probe;
    p.l2_strength = l2;
    out.push_back(p);
  }
  return out;
}

RunConfig parse_run_config(std::string_view toml_text, const std::vector<Override>& overrides,
                           std::string_view origin) {
  toml::table root = parse_toml(toml_text, origin);
  for (const auto& ov : overrides) apply_override(root, ov);

  RunConfig cfg;
  bool kind_set = false;
  const auto setters = make_setters(kind_set);
  auto apply = [&](const std::string& key, const toml::node& node) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorCode::kConfig, fmt::format("unknown config key '{}'", key));
    try {
      it->second(cfg, node);
    } catch (const BadValue& e) {
      fail(ErrorCode::kConfig, fmt::format("config key '{}': {}", key, e.why));
    }
  };
  for (const auto& [k, v] : root) {
    const std::string key(k.str());
    if (const auto* section = v.as_table()) {
      for (const auto& [k2, v2] : *section) apply(key + "." + std::string(k2.str()), v2);
    } else {
      apply(key, v);
    }
  }

  if (!kind_set) cfg.encoder.kind = cfg.task == Level::kGraph ? EncoderKind::kGin : EncoderKind::kGcn;
  const std::uint64_t data_seed = cfg.dataset.seed.value_or(derive_seed(cfg.seed, SeedStream::kData));
  cfg.dataset.sbm.seed = data_seed;
  cfg.dataset.motifs.seed = data_seed;
  cfg.eval.split.seed = derive_seed(cfg.seed, SeedStream::kSplit);
  cfg.train.seed = derive_seed(cfg.seed, SeedStream::kTrain);
  cfg.train.level = cfg.task;

  // Value-level validation, reported as configuration errors.
  try {
    if (cfg.dataset.kind == DatasetKind::kPath && cfg.dataset.path.empty()) fail(ErrorCode::kConfig, "dataset.path is empty");
    if (cfg.dataset.kind == DatasetKind::kSbm && cfg.task == Level::kGraph)
      fail(ErrorCode::kConfig, "dataset.kind 'sbm' is a node-level dataset but task is 'graph'");
    if (cfg.dataset.kind == DatasetKind::kMotifs && cfg.task == Level::kNode)
      fail(ErrorCode::kConfig, "dataset.kind 'motifs' is a graph-level dataset but task is 'node'");
    if (cfg.dataset.kind == DatasetKind::kSbm) cfg.dataset.sbm.validate();
    if (cfg.dataset.kind == DatasetKind::kMotifs) cfg.dataset.motifs.validate();
    cfg.train.validate();
    cfg.eval.split.validate();
    cfg.eval.probe.validate();
    if (cfg.eval.l2_grid.empty()) fail(ErrorCode::kConfig, "eval.l2_grid must not be empty");
    for (double l2 : cfg.eval.l2_grid)
      if (!(l2 >= 0.0)) fail(ErrorCode::kConfig, "eval.l2_grid entries must be >= 0");
    if (cfg.eval.folds < 2) fail(ErrorCode::kConfig, "eval.folds must be >= 2");
    if (!(cfg.gradcheck_eps > 0.0)) fail(ErrorCode::kConfig, "gradcheck.eps must be > 0");
    EncoderConfig probe_enc = cfg.encoder;
    probe_enc.input_dim = std::max<std::size_t>(1, probe_enc.input_dim);
    probe_enc.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    fail(ErrorCode::kConfig, e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<Override>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kConfig, fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), overrides, path);
}

}  // namespace fastgcl
