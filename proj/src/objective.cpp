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

#include "objective.hpp"

namespace fastgcl {

Level parse_level(std::string_view s) {
  if (s == "node") return Level::kNode;
  if (s == "graph") return Level::kGraph;
  fail(ErrorCode::kConfig, "unknown task level '" + std::string(s) + "'");
}

EdgeWeightMode parse_edge_weight_mode(std::string_view s) {
  if (s == "learned") return EdgeWeightMode::kLearned;
  if (s == "random") return EdgeWeightMode::kRandom;
  if (s == "unit") return EdgeWeightMode::kUnit;
  fail(ErrorCode::kConfig, "unknown ablation mode '" + std::string(s) + "'");
}

std::string to_string(Level l) { return l == Level::kNode ? "node" : "graph"; }

std::string to_string(EdgeWeightMode m) {
  switch (m) {
    case EdgeWeightMode::kLearned:
      return "learned";
    case EdgeWeightMode::kRandom:
      return "random";
    case EdgeWeightMode::kUnit:
      return "unit";
  }
  return "?";
}

PreparedGraph::PreparedGraph(const Graph& g)
    : graph(&g),
      normalized(normalize(g)),
      identity(identity_view(g)),
      entry_rows(g.entry_rows()),
      graph_ids(g.has_graph_ids() ? g.graph_ids() : std::vector<std::size_t>(g.num_nodes(), 0)),
      num_graphs(g.num_graphs()) {}

ParamSet init_weighter_params(std::size_t hidden_dim, std::size_t proj_dim, std::uint64_t seed) {
  Rng rng(seed);
  ParamSet p;
  p.add("weighter.0.weight", glorot_uniform(hidden_dim, proj_dim, rng));
  p.add("weighter.0.bias", Matrix(1, proj_dim));
  p.add("weighter.slope", Matrix(1, 1, 0.25));
  p.add("weighter.1.weight", glorot_uniform(proj_dim, proj_dim, rng));
  p.add("weighter.1.bias", Matrix(1, proj_dim));
  return p;
}

ParamSet init_model_params(const EncoderConfig& cfg, std::uint64_t seed) {
  ParamSet p = init_encoder_params(cfg, mix_seed(seed, 0));
  p.append(init_weighter_params(cfg.hidden_dim, cfg.hidden_dim, mix_seed(seed, 1)));
  return p;
}

bool is_weighter_param(const std::string& name) { return name.rfind("weighter.", 0) == 0; }

ad::Var compute_edge_weights(const BoundParams& params, ad::Var h_alpha, const PreparedGraph& prep) {
  require(h_alpha.rows() == prep.graph->num_nodes(), "compute_edge_weights: row count mismatch");
  const ad::Var hidden = ad::prelu(
      ad::add_bias(ad::matmul(h_alpha, params["weighter.0.weight"]), params["weighter.0.bias"]),
      params["weighter.slope"]);
  const ad::Var z = ad::add_bias(ad::matmul(hidden, params["weighter.1.weight"]), params["weighter.1.bias"]);
  return ad::sigmoid(ad::pair_dot(z, prep.entry_rows, prep.graph->col_idx()));
}

Matrix random_edge_weights(const Graph& g, std::uint64_t seed) {
  Rng rng(seed);
  Matrix w(g.num_directed_edges(), 1);
  const auto mirror = g.mirror_entries();
  const auto rows = g.entry_rows();
  for (std::size_t e = 0; e < w.rows(); ++e) {
    if (rows[e] < g.col_idx()[e]) {
      const double x = rng.uniform_open();
      w[e] = x;
      w[mirror[e]] = x;
    }
  }
  return w;
}

ViewBundle build_views(const EncoderConfig& cfg, const BoundParams& params, const PreparedGraph& prep,
                       ad::Var x, EdgeWeightMode mode, const Matrix* fixed_weights) {
  ad::Tape& tape = x.tape();
  ViewBundle v;
  v.anchor = encode(cfg, params, prep.normalized, std::nullopt, x);
  switch (mode) {
    case EdgeWeightMode::kLearned:
      v.edge_weights = compute_edge_weights(params, v.h_alpha(), prep);
      break;
    case EdgeWeightMode::kRandom:
      require(fixed_weights != nullptr && fixed_weights->rows() == prep.graph->num_directed_edges(),
              "random edge-weight mode needs one fixed weight per directed edge");
      v.edge_weights = tape.constant(*fixed_weights);
      break;
    case EdgeWeightMode::kUnit:
      v.edge_weights = tape.constant(Matrix(prep.graph->num_directed_edges(), 1, 1.0));
      break;
  }
  v.positive = encode(cfg, params, prep.normalized, v.edge_weights, x);
  v.negative = encode(cfg, params, prep.identity, std::nullopt, x);
  return v;
}

ad::Var ssl_loss(const ViewBundle& views, Level level, const PreparedGraph& prep) {
  ad::Var a, p, n;
  if (level == Level::kNode) {
    a = views.h_alpha();
    p = views.h_rho();
    n = views.h_eta();
  } else {
    a = readout(views.anchor, prep.graph_ids, prep.num_graphs);
    p = readout(views.positive, prep.graph_ids, prep.num_graphs);
    n = readout(views.negative, prep.graph_ids, prep.num_graphs);
  }
  require(a.rows() > 0, "ssl_loss: no objects to contrast");
  const ad::Var pos = ad::log(ad::sigmoid(ad::row_cosine(a, p)));
  // log(1 − σ(s)) written as log σ(−s).
  const ad::Var neg = ad::log(ad::sigmoid(ad::scale(ad::row_cosine(a, n), -1.0)));
  return ad::scale(ad::add(ad::mean(pos), ad::mean(neg)), -1.0);
}

ad::Var norm_loss(ad::Var edge_weights) {
  require(edge_weights.rows() > 0, "norm_loss: empty edge set");
  for (double e : edge_weights.value().data()) require(e > 0.0 && e <= 1.0, "norm_loss: edge weight outside (0,1]");
  return ad::scale(ad::mean(ad::softplus(ad::affine(edge_weights, -1.0, 1.0))), -1.0);
}

LossTerms total_loss(const ViewBundle& views, Level level, double lambda, const PreparedGraph& prep) {
  require(lambda >= 0.0, "lambda must be >= 0");
  LossTerms t;
  t.ssl = ssl_loss(views, level, prep);
  if (views.edge_weights.rows() == 0 && lambda == 0.0) {
    t.total = t.ssl;
    return t;
  }
  t.norm = norm_loss(views.edge_weights);
  t.total = lambda == 0.0 ? t.ssl : ad::add(t.ssl, ad::scale(*t.norm, lambda));
  return t;
}

}  // namespace fastgcl
