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

#include "trainer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

#include "optimizer.hpp"

namespace fastgcl {

namespace {

struct StepOutput {
  double loss = 0.0;
  double l_ssl = 0.0;
  double l_norm = 0.0;
  double min_w = std::numeric_limits<double>::infinity();
  double max_w = -std::numeric_limits<double>::infinity();
  std::vector<Matrix> grads;
};

StepOutput forward_backward(const EncoderConfig& enc, const ParamSet& params, const PreparedGraph& prep,
                            const TrainConfig& cfg, const Matrix* fixed_weights) {
  ad::Tape tape;
  const BoundParams bound(tape, params, true);
  const ad::Var x = tape.constant(prep.graph->features());
  const ViewBundle views = build_views(enc, bound, prep, x, cfg.ablation, fixed_weights);
  const LossTerms loss = total_loss(views, cfg.level, cfg.lambda, prep);
  tape.backward(loss.total);

  StepOutput out;
  out.loss = loss.total.value()[0];
  out.l_ssl = loss.ssl.value()[0];
  out.l_norm = loss.norm ? loss.norm->value()[0] : 0.0;
  for (double w : views.edge_weights.value().data()) {
    out.min_w = std::min(out.min_w, w);
    out.max_w = std::max(out.max_w, w);
  }
  out.grads.reserve(bound.vars().size());
  for (const auto& v : bound.vars()) out.grads.push_back(tape.grad(v));
  return out;
}

std::vector<bool> trainable_mask(const ParamSet& params, EdgeWeightMode mode) {
  std::vector<bool> mask;
  for (const auto& t : params.tensors())
    mask.push_back(mode == EdgeWeightMode::kLearned || !is_weighter_param(t.name));
  return mask;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

[[noreturn]] void rethrow_at_epoch(const Error& e, std::size_t epoch) {
  if (e.code() == ErrorCode::kNonFinite)
    fail(ErrorCode::kNonFinite, fmt::format("non-finite loss at epoch {}: {}", epoch, e.what()));
  throw e;
}

void check_finite(const ParamSet& params, std::size_t epoch) {
  if (!params.all_finite()) fail(ErrorCode::kNonFinite, fmt::format("non-finite parameter after epoch {}", epoch));
}

}  // namespace

void TrainConfig::validate() const {
  require(epochs >= 1, "epochs must be >= 1");
  require(lr > 0.0, "lr must be > 0");
  require(weight_decay >= 0.0, "weight_decay must be >= 0");
  require(lambda >= 0.0, "lambda must be >= 0");
  require(batch_size >= 1, "batch_size must be >= 1");
}

TrainResult train(const Graph& g, const EncoderConfig& enc, const TrainConfig& cfg, ParamSet params,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  require(g.num_nodes() > 0, "cannot train on an empty graph");
  const PreparedGraph prep(g);
  Adam opt({cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay}, params, trainable_mask(params, cfg.ablation));
  Matrix fixed;
  if (cfg.ablation == EdgeWeightMode::kRandom) fixed = random_edge_weights(g, cfg.seed);

  TrainResult res;
  res.report.seed = cfg.seed;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.ablation == EdgeWeightMode::kRandom && cfg.resample_random && epoch > 1)
      fixed = random_edge_weights(g, mix_seed(cfg.seed, epoch));
    StepOutput out;
    try {
      out = forward_backward(enc, params, prep, cfg, &fixed);
    } catch (const Error& e) {
      rethrow_at_epoch(e, epoch);
    }
    opt.step(params, out.grads);
    check_finite(params, epoch);
    EpochRecord rec{epoch, out.loss, out.l_ssl, out.l_norm, elapsed_ms(t0), out.min_w, out.max_w};
    if (g.num_directed_edges() == 0) rec.min_edge_weight = rec.max_edge_weight = 0.0;
    res.report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  res.report.steps = opt.steps();
  res.report.total_ms = elapsed_ms(start);
  res.params = std::move(params);
  return res;
}

TrainResult train(const GraphDataset& data, const EncoderConfig& enc, const TrainConfig& cfg, ParamSet params,
                  const EpochCallback& on_epoch) {
  cfg.validate();
  require(data.size() > 0, "cannot train on an empty graph dataset");
  TrainConfig step_cfg = cfg;
  step_cfg.level = Level::kGraph;
  Adam opt({cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay}, params, trainable_mask(params, cfg.ablation));

  // Random weights are drawn per graph so that they stay fixed while batch
  // composition changes between epochs.
  std::vector<Matrix> per_graph_weights;
  auto draw_random = [&](std::uint64_t seed) {
    per_graph_weights.clear();
    for (std::size_t i = 0; i < data.size(); ++i)
      per_graph_weights.push_back(random_edge_weights(data.graphs[i], mix_seed(seed, i)));
  };
  if (cfg.ablation == EdgeWeightMode::kRandom) draw_random(cfg.seed);

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(mix_seed(cfg.seed, 0xB47C));

  TrainResult res;
  res.report.seed = cfg.seed;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.ablation == EdgeWeightMode::kRandom && cfg.resample_random && epoch > 1)
      draw_random(mix_seed(cfg.seed, epoch));
    shuffle_rng.shuffle(order.begin(), order.end());
    EpochRecord rec;
    rec.epoch = epoch;
    rec.min_edge_weight = std::numeric_limits<double>::infinity();
    rec.max_edge_weight = -std::numeric_limits<double>::infinity();
    std::size_t batches = 0;
    for (std::size_t first = 0; first < order.size(); first += cfg.batch_size) {
      const std::size_t last = std::min(order.size(), first + cfg.batch_size);
      std::vector<Graph> members;
      Matrix fixed;
      for (std::size_t i = first; i < last; ++i) members.push_back(data.graphs[order[i]]);
      if (cfg.ablation == EdgeWeightMode::kRandom) {
        std::vector<double> w;
        for (std::size_t i = first; i < last; ++i) {
          const auto& src = per_graph_weights[order[i]].data();
          w.insert(w.end(), src.begin(), src.end());
        }
        const std::size_t rows = w.size();
        fixed = Matrix(rows, 1, std::move(w));
      }
      const Graph batch = batch_graphs(members);
      const PreparedGraph prep(batch);
      StepOutput out;
      try {
        out = forward_backward(enc, params, prep, step_cfg, &fixed);
      } catch (const Error& e) {
        rethrow_at_epoch(e, epoch);
      }
      opt.step(params, out.grads);
      check_finite(params, epoch);
      rec.loss += out.loss;
      rec.l_ssl += out.l_ssl;
      rec.l_norm += out.l_norm;
      if (batch.num_directed_edges() > 0) {
        rec.min_edge_weight = std::min(rec.min_edge_weight, out.min_w);
        rec.max_edge_weight = std::max(rec.max_edge_weight, out.max_w);
      }
      ++batches;
    }
    const double nb = static_cast<double>(batches);
    rec.loss /= nb;
    rec.l_ssl /= nb;
    rec.l_norm /= nb;
    if (rec.min_edge_weight > rec.max_edge_weight) rec.min_edge_weight = rec.max_edge_weight = 0.0;
    rec.ms = elapsed_ms(t0);
    res.report.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  res.report.steps = opt.steps();
  res.report.total_ms = elapsed_ms(start);
  res.params = std::move(params);
  return res;
}

ScalarFn objective_function(const EncoderConfig& enc, const ParamSet& layout, const PreparedGraph& prep,
                            Level level, double lambda, EdgeWeightMode mode, const Matrix* fixed_weights) {
  return [&enc, &layout, &prep, level, lambda, mode, fixed_weights](ad::Tape& tape, std::span<const ad::Var> vars) {
    const BoundParams bound(layout, std::vector<ad::Var>(vars.begin(), vars.end()));
    const ad::Var x = tape.constant(prep.graph->features());
    const ViewBundle views = build_views(enc, bound, prep, x, mode, fixed_weights);
    return total_loss(views, level, lambda, prep).total;
  };
}

}  // namespace fastgcl
