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

// Contrastive objective over three views of one graph: the anchor (plain
// neighborhood aggregation), the positive (aggregation re-weighted by a
// learned edge weighter), and the negative (self-loops only, so the encoder
// acts as a per-node MLP).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "autodiff.hpp"
#include "encoder.hpp"
#include "graph.hpp"
#include "params.hpp"

namespace fastgcl {

enum class Level { kNode, kGraph };
enum class EdgeWeightMode { kLearned, kRandom, kUnit };

Level parse_level(std::string_view s);
EdgeWeightMode parse_edge_weight_mode(std::string_view s);
std::string to_string(Level l);
std::string to_string(EdgeWeightMode m);

/// Graph plus the propagation operators and index tables every step needs.
/// Holds a pointer to `graph`, which must outlive it.
struct PreparedGraph {
  explicit PreparedGraph(const Graph& graph);

  const Graph* graph;
  Adjacency normalized;
  Adjacency identity;
  std::vector<std::size_t> entry_rows;  // source node per directed entry
  std::vector<std::size_t> graph_ids;   // all zeros without a batch
  std::size_t num_graphs;
};

// Edge weighter g_φ: Linear(d, proj) → prelu → Linear(proj, proj).
//   weighter.0.weight, weighter.0.bias, weighter.slope, weighter.1.weight, weighter.1.bias
ParamSet init_weighter_params(std::size_t hidden_dim, std::size_t proj_dim, std::uint64_t seed);

/// Encoder and weighter parameters in one set; the weighter projects the
/// final encoder layer to hidden_dim.
ParamSet init_model_params(const EncoderConfig& cfg, std::uint64_t seed);
bool is_weighter_param(const std::string& name);

/// e = σ(⟨z_u, z_v⟩) with Z = g_φ(H^α), one entry per directed edge in CSR
/// order. Mirror entries are bitwise equal.
ad::Var compute_edge_weights(const BoundParams& params, ad::Var h_alpha, const PreparedGraph& prep);

/// Independent uniform(0,1) weight per undirected edge, mirrored to both
/// directed entries.
Matrix random_edge_weights(const Graph& g, std::uint64_t seed);

struct ViewBundle {
  std::vector<ad::Var> anchor;    // per layer
  std::vector<ad::Var> positive;  // per layer
  std::vector<ad::Var> negative;  // per layer
  ad::Var edge_weights;           // num_directed_edges × 1

  ad::Var h_alpha() const { return anchor.back(); }
  ad::Var h_rho() const { return positive.back(); }
  ad::Var h_eta() const { return negative.back(); }
};

/// Builds the three views with shared encoder parameters. In kLearned mode
/// the weights come from the weighter applied to the anchor (gradient flows
/// through both). kRandom uses `fixed_weights` as a constant; kUnit uses 1.
ViewBundle build_views(const EncoderConfig& cfg, const BoundParams& params, const PreparedGraph& prep,
                       ad::Var x, EdgeWeightMode mode, const Matrix* fixed_weights = nullptr);

/// −mean[log σ(cos(a, ρ)) + log(1 − σ(cos(a, η)))] over nodes or, at graph
/// level, over per-graph readouts.
ad::Var ssl_loss(const ViewBundle& views, Level level, const PreparedGraph& prep);

/// −mean over directed edges of log(1 + exp(1 − e)).
ad::Var norm_loss(ad::Var edge_weights);

struct LossTerms {
  ad::Var total;
  ad::Var ssl;
  std::optional<ad::Var> norm;  // absent for edgeless input with λ = 0
};

/// L_ssl + λ·L_norm.
LossTerms total_loss(const ViewBundle& views, Level level, double lambda, const PreparedGraph& prep);

}  // namespace fastgcl
