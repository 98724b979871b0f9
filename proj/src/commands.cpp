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

#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

namespace fastgcl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::mutex g_log_mutex;
LogSink g_log_sink;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, fmt::format("cannot create directory '{}': {}", dir.string(), ec.message()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, fmt::format("cannot open '{}' for writing", path.string()));
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::kIo, fmt::format("write to '{}' failed", path.string()));
}

json probe_json(const ProbeConfig& p) {
  return {{"l2_strength", p.l2_strength}, {"max_iters", p.max_iters}, {"tol", p.tol}, {"lr", p.lr}};
}

json encoder_json(const EncoderConfig& e) {
  return {{"kind", to_string(e.kind)},         {"num_layers", e.num_layers},
          {"input_dim", e.input_dim},          {"hidden_dim", e.hidden_dim},
          {"activation", to_string(e.activation)}, {"gin_eps", e.gin_eps},
          {"gin_train_eps", e.gin_train_eps},  {"mlp_hidden", e.gin_mlp_hidden()}};
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("FASTGCL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = std::min(n, static_cast<std::size_t>(v));
    else log_message(LogLevel::kWarn, fmt::format("ignoring invalid FASTGCL_THREADS='{}'", env));
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

std::optional<BaselineKind> baseline_of(const std::string& s) {
  if (s.empty() || s == "none") return std::nullopt;
  return parse_baseline(s);
}

}  // namespace

void set_log_sink(LogSink sink) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  g_log_sink = std::move(sink);
}

void log_message(LogLevel level, const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  if (g_log_sink) {
    g_log_sink(level, msg);
    return;
  }
  static constexpr const char* kTags[] = {"info", "warn", "error"};
  std::cerr << "[" << kTags[static_cast<int>(level)] << "] " << msg << "\n";
}

LoadedData load_data(const RunConfig& cfg) {
  LoadedData d;
  d.level = cfg.task;
  switch (cfg.dataset.kind) {
    case DatasetKind::kSbm:
      d.graph = generate_sbm(cfg.dataset.sbm);
      break;
    case DatasetKind::kMotifs:
      d.dataset = generate_motif_dataset(cfg.dataset.motifs);
      break;
    case DatasetKind::kPath: {
      Graph g = load_graph(cfg.dataset.path);
      if (cfg.task == Level::kGraph) {
        if (!g.has_graph_ids())
          fail(ErrorCode::kConfig, fmt::format("task 'graph' needs graph_ids.csv in '{}'", cfg.dataset.path));
        d.dataset = GraphDataset::from_batch(g);
      } else {
        d.graph = std::move(g);
      }
      break;
    }
  }
  if (d.level == Level::kNode) {
    d.feature_dim = d.graph.feature_dim();
    d.num_nodes = d.graph.num_nodes();
  } else {
    if (d.dataset.size() == 0) fail(ErrorCode::kConfig, "graph dataset is empty");
    d.feature_dim = d.dataset.graphs.front().feature_dim();
    for (const auto& g : d.dataset.graphs) d.num_nodes += g.num_nodes();
  }
  return d;
}

EncoderConfig resolve_encoder(const RunConfig& cfg, const LoadedData& data) {
  EncoderConfig e = cfg.encoder;
  e.input_dim = data.feature_dim;
  e.validate();
  return e;
}

TrainResult run_training(const RunConfig& cfg, const LoadedData& data) {
  const EncoderConfig enc = resolve_encoder(cfg, data);
  ParamSet params = init_model_params(enc, cfg.init_seed());
  const std::size_t every = cfg.train.log_every;
  EpochCallback cb;
  if (every > 0) {
    cb = [every](const EpochRecord& r) {
      if (r.epoch % every == 0)
        log_message(LogLevel::kInfo, fmt::format("epoch {:>4}  loss {:.6f}  l_ssl {:.6f}  l_norm {:.6f}  w [{:.4f}, {:.4f}]",
                                                 r.epoch, r.loss, r.l_ssl, r.l_norm, r.min_edge_weight,
                                                 r.max_edge_weight));
    };
  }
  if (data.level == Level::kNode) return train(data.graph, enc, cfg.train, std::move(params), cb);
  return train(data.dataset, enc, cfg.train, std::move(params), cb);
}

EvalReport run_evaluation(const RunConfig& cfg, const LoadedData& data, const ParamSet* params,
                          std::optional<BaselineKind> baseline) {
  const EncoderConfig enc = resolve_encoder(cfg, data);
  const auto grid = cfg.eval.grid();
  if (data.level == Level::kNode) {
    if (!data.graph.has_labels()) fail(ErrorCode::kPrecondition, "evaluation needs node labels");
    Matrix emb;
    if (baseline) {
      emb = baseline_embeddings(*baseline, data.graph, enc, cfg.init_seed());
    } else {
      check_encoder_params(enc, *params);
      emb = node_embeddings(enc, *params, data.graph);
    }
    return evaluate_node(emb, data.graph.labels(), cfg.eval.split, grid);
  }
  if (data.dataset.labels.size() != data.dataset.size()) fail(ErrorCode::kPrecondition, "evaluation needs graph labels");
  Matrix emb;
  if (baseline) {
    emb = baseline_embeddings(*baseline, data.dataset, enc, cfg.init_seed());
  } else {
    check_encoder_params(enc, *params);
    emb = graph_embeddings(enc, *params, data.dataset);
  }
  return evaluate_graph_cv(emb, data.dataset.labels, cfg.eval.folds, cfg.eval.split.seed, grid);
}

void write_curve_csv(const TrainReport& report, bool record_timing, const fs::path& path) {
  std::string out = "epoch,loss,l_ssl,l_norm,ms\n";
  for (const auto& r : report.epochs)
    out += fmt::format("{},{},{},{},{}\n", r.epoch, r.loss, r.l_ssl, r.l_norm, record_timing ? r.ms : 0.0);
  write_text(path, out);
}

void write_train_report(const RunConfig& cfg, const TrainReport& report, const fs::path& path) {
  json epochs = json::array();
  for (const auto& r : report.epochs)
    epochs.push_back({{"epoch", r.epoch},
                      {"loss", r.loss},
                      {"l_ssl", r.l_ssl},
                      {"l_norm", r.l_norm},
                      {"ms", r.ms},
                      {"min_edge_weight", r.min_edge_weight},
                      {"max_edge_weight", r.max_edge_weight}});
  json j = {{"seed", cfg.seed},
            {"task", to_string(cfg.task)},
            {"encoder", encoder_json(cfg.encoder)},
            {"train",
             {{"epochs", cfg.train.epochs},
              {"lr", cfg.train.lr},
              {"weight_decay", cfg.train.weight_decay},
              {"lambda", cfg.train.lambda},
              {"batch_size", cfg.train.batch_size},
              {"ablation", to_string(cfg.train.ablation)}}},
            {"steps", report.steps},
            {"total_ms", report.total_ms},
            {"final_loss", report.epochs.empty() ? 0.0 : report.epochs.back().loss},
            {"checkpoint", "params.ckpt"},
            {"epochs", std::move(epochs)}};
  write_text(path, j.dump(2) + "\n");
}

void write_eval_json(const EvalReport& report, const std::string& source, const fs::path& path) {
  json j = {{"per_run", report.per_run},
            {"mean", report.mean},
            {"std", report.std},
            {"selected_probe", probe_json(report.selected)},
            {"grid_val_mean", report.grid_val_mean},
            {"protocol", report.protocol},
            {"source", source}};
  write_text(path, j.dump(2) + "\n");
}

TrainResult cmd_train(const RunConfig& cfg) {
  const LoadedData data = load_data(cfg);
  RunConfig echo = cfg;
  echo.encoder = resolve_encoder(cfg, data);
  log_message(LogLevel::kInfo, fmt::format("training {} encoder on {} nodes for {} epochs", to_string(echo.encoder.kind),
                                           data.num_nodes, cfg.train.epochs));
  TrainResult res = run_training(cfg, data);
  const fs::path dir = cfg.output_dir;
  ensure_dir(dir);
  write_curve_csv(res.report, cfg.record_timing, dir / "curve.csv");
  write_train_report(echo, res.report, dir / "report.json");
  try {
    save_checkpoint(res.params, dir / "params.ckpt");
  } catch (const Error& e) {
    fail(ErrorCode::kIo, e.what());
  }
  log_message(LogLevel::kInfo, fmt::format("final loss {:.6f}; wrote {}", res.report.epochs.back().loss, dir.string()));
  return res;
}

EvalReport cmd_eval(const RunConfig& cfg, const std::string& checkpoint, const std::string& baseline) {
  const auto kind = baseline_of(baseline);
  const LoadedData data = load_data(cfg);
  const fs::path dir = cfg.output_dir;
  EvalReport report;
  std::string source;
  if (kind) {
    report = run_evaluation(cfg, data, nullptr, kind);
    source = *kind == BaselineKind::kRawFeature ? "raw_feature" : "riu";
  } else {
    const fs::path ckpt = checkpoint.empty() ? dir / "params.ckpt" : fs::path(checkpoint);
    const ParamSet params = load_checkpoint(ckpt);
    report = run_evaluation(cfg, data, &params, std::nullopt);
    source = "checkpoint";
  }
  ensure_dir(dir);
  write_eval_json(report, source, dir / "eval.json");
  log_message(LogLevel::kInfo, fmt::format("{} accuracy {:.2f} ± {:.2f} over {} runs", source, 100.0 * report.mean,
                                           100.0 * report.std, report.per_run.size()));
  return report;
}

GradCheckResult cmd_gradcheck(const RunConfig& cfg, bool corrupt_adjoints) {
  const LoadedData data = load_data(cfg);
  if (data.num_nodes > kGradCheckMaxNodes)
    fail(ErrorCode::kPrecondition, fmt::format("gradcheck needs a graph with at most {} nodes; this one has {}",
                                               kGradCheckMaxNodes, data.num_nodes));
  const EncoderConfig enc = resolve_encoder(cfg, data);
  const ParamSet params = init_model_params(enc, cfg.init_seed());
  const Graph g = data.level == Level::kNode ? data.graph : batch_graphs(data.dataset.graphs);
  const PreparedGraph prep(g);
  Matrix fixed;
  if (cfg.train.ablation == EdgeWeightMode::kRandom) fixed = random_edge_weights(g, cfg.train.seed);
  const ScalarFn f = objective_function(enc, params, prep, cfg.task, cfg.train.lambda, cfg.train.ablation, &fixed);
  std::vector<Matrix> values;
  for (const auto& t : params.tensors()) values.push_back(t.value);
  const GradCheckResult r = grad_check(f, std::move(values), {cfg.gradcheck_eps, corrupt_adjoints});
  log_message(LogLevel::kInfo,
              fmt::format("gradcheck over {} entries: max rel error {:.3e} at {}[{}] (analytic {:.6e}, numeric {:.6e})",
                          r.entries, r.max_rel_error, params.tensors()[r.worst_param].name, r.worst_entry, r.analytic,
                          r.numeric));
  return r;
}

SweepSummary cmd_sweep(const RunConfig& cfg) {
  if (cfg.sweep.empty()) fail(ErrorCode::kConfig, "sweep needs at least one of sweep.hidden_dim, sweep.num_layers, sweep.lambda, sweep.ablation");
  auto or_base = [](auto list, auto base) { return list.empty() ? decltype(list){base} : list; };
  const auto ds = or_base(cfg.sweep.hidden_dim, cfg.encoder.hidden_dim);
  const auto ks = or_base(cfg.sweep.num_layers, cfg.encoder.num_layers);
  const auto lams = or_base(cfg.sweep.lambda, cfg.train.lambda);
  const auto abls = or_base(cfg.sweep.ablation, cfg.train.ablation);

  std::vector<RunConfig> cells;
  for (auto d : ds)
    for (auto k : ks)
      for (auto lam : lams)
        for (auto abl : abls) {
          RunConfig c = cfg;
          c.encoder.hidden_dim = d;
          c.encoder.num_layers = k;
          c.train.lambda = lam;
          c.train.ablation = abl;
          c.output_dir = (fs::path(cfg.output_dir) /
                          fmt::format("cell_{:03}_d{}_K{}_lambda{}_{}", cells.size(), d, k, lam, to_string(abl)))
                             .string();
          cells.push_back(std::move(c));
        }

  const LoadedData data = load_data(cfg);
  struct CellResult {
    bool ok = false;
    double mean = 0.0, std = 0.0, final_loss = 0.0;
    std::string error;
  };
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const RunConfig& c = cells[i];
      try {
        const TrainResult tr = run_training(c, data);
        const EvalReport ev = run_evaluation(c, data, &tr.params, std::nullopt);
        ensure_dir(c.output_dir);
        RunConfig echo = c;
        echo.encoder = resolve_encoder(c, data);
        write_curve_csv(tr.report, c.record_timing, fs::path(c.output_dir) / "curve.csv");
        write_train_report(echo, tr.report, fs::path(c.output_dir) / "report.json");
        save_checkpoint(tr.params, fs::path(c.output_dir) / "params.ckpt");
        write_eval_json(ev, "checkpoint", fs::path(c.output_dir) / "eval.json");
        results[i] = {true, ev.mean, ev.std, tr.report.epochs.back().loss, {}};
        log_message(LogLevel::kInfo, fmt::format("cell {}/{}: acc {:.4f}", i + 1, cells.size(), ev.mean));
      } catch (const std::exception& e) {
        results[i].error = e.what();
        log_message(LogLevel::kWarn, fmt::format("cell {}/{} failed: {}", i + 1, cells.size(), e.what()));
      }
    }
  };
  const std::size_t threads = worker_count(cells.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SweepSummary summary{cells.size(), 0};
  std::string csv = "d,K,lambda,mean_acc,std_acc,final_loss,ablation\n";
  std::string failures;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    if (!results[i].ok) {
      failures += fmt::format("{},{},{},{},\"{}\"\n", c.encoder.hidden_dim, c.encoder.num_layers, c.train.lambda,
                              to_string(c.train.ablation), results[i].error);
      continue;
    }
    ++summary.succeeded;
    csv += fmt::format("{},{},{},{},{},{},{}\n", c.encoder.hidden_dim, c.encoder.num_layers, c.train.lambda,
                       results[i].mean, results[i].std, results[i].final_loss, to_string(c.train.ablation));
  }
  ensure_dir(cfg.output_dir);
  write_text(fs::path(cfg.output_dir) / "sweep.csv", csv);
  if (!failures.empty())
    write_text(fs::path(cfg.output_dir) / "sweep_failures.csv", "d,K,lambda,ablation,error\n" + failures);
  if (summary.succeeded == 0) fail(ErrorCode::kSweep, fmt::format("all {} sweep cells failed", cells.size()));
  return summary;
}

void cmd_gen_data(const RunConfig& cfg, const fs::path& out_dir) {
  const LoadedData data = load_data(cfg);
  ensure_dir(out_dir);
  if (data.level == Level::kNode) {
    save_graph(data.graph, out_dir);
  } else {
    save_graph(data.dataset.to_batch(), out_dir);
  }
  log_message(LogLevel::kInfo, fmt::format("wrote {} nodes to {}", data.num_nodes, out_dir.string()));
}

}  // namespace fastgcl
