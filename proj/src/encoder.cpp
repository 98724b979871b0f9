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

#include "encoder.hpp"

#include <fmt/format.h>

namespace fastgcl {

namespace {

constexpr double kPreluInit = 0.25;

ad::Var activate(Activation act, ad::Var h, const BoundParams& params, std::size_t layer) {
  switch (act) {
    case Activation::kPrelu:
      return ad::prelu(h, params[encoder_param_name(layer, "slope")]);
    case Activation::kRelu:
      return ad::relu(h);
    case Activation::kIdentity:
      return h;
  }
  return h;
}

}  // namespace

EncoderKind parse_encoder_kind(std::string_view s) {
  if (s == "gcn") return EncoderKind::kGcn;
  if (s == "gin") return EncoderKind::kGin;
  fail(ErrorCode::kConfig, "unknown encoder kind '" + std::string(s) + "'");
}

Activation parse_activation(std::string_view s) {
  if (s == "prelu") return Activation::kPrelu;
  if (s == "relu") return Activation::kRelu;
  if (s == "identity") return Activation::kIdentity;
  fail(ErrorCode::kConfig, "unknown activation '" + std::string(s) + "'");
}

std::string to_string(EncoderKind k) { return k == EncoderKind::kGcn ? "gcn" : "gin"; }

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kPrelu:
      return "prelu";
    case Activation::kRelu:
      return "relu";
    case Activation::kIdentity:
      return "identity";
  }
  return "?";
}

void EncoderConfig::validate() const {
  require(num_layers >= 1, "encoder needs at least one layer");
  require(input_dim >= 1 && hidden_dim >= 1, "encoder dimensions must be >= 1");
}

std::string encoder_param_name(std::size_t layer, std::string_view leaf) {
  return fmt::format("encoder.{}.{}", layer, leaf);
}

ParamSet init_encoder_params(const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  ParamSet p;
  std::size_t in = cfg.input_dim;
  for (std::size_t k = 0; k < cfg.num_layers; ++k) {
    if (cfg.kind == EncoderKind::kGcn) {
      p.add(encoder_param_name(k, "weight"), glorot_uniform(in, cfg.hidden_dim, rng));
      p.add(encoder_param_name(k, "bias"), Matrix(1, cfg.hidden_dim));
    } else {
      const std::size_t mid = cfg.gin_mlp_hidden();
      p.add(encoder_param_name(k, "mlp0.weight"), glorot_uniform(in, mid, rng));
      p.add(encoder_param_name(k, "mlp0.bias"), Matrix(1, mid));
      p.add(encoder_param_name(k, "mlp1.weight"), glorot_uniform(mid, cfg.hidden_dim, rng));
      p.add(encoder_param_name(k, "mlp1.bias"), Matrix(1, cfg.hidden_dim));
      if (cfg.gin_train_eps) p.add(encoder_param_name(k, "eps"), Matrix(1, 1, cfg.gin_eps));
    }
    if (cfg.activation == Activation::kPrelu) p.add(encoder_param_name(k, "slope"), Matrix(1, 1, kPreluInit));
    in = cfg.hidden_dim;
  }
  return p;
}

void check_encoder_params(const EncoderConfig& cfg, const ParamSet& params) {
  const ParamSet expected = init_encoder_params(cfg, 0);
  for (const auto& t : expected.tensors()) {
    const auto i = params.index_of(t.name);
    if (!i) fail(ErrorCode::kCheckpoint, "checkpoint is missing tensor " + t.name);
    const auto& got = params.tensors()[*i].value;
    if (!got.same_shape(t.value))
      fail(ErrorCode::kCheckpoint, fmt::format("checkpoint tensor {} has shape {}, config expects {}", t.name,
                                               got.shape_str(), t.value.shape_str()));
  }
}

std::vector<ad::Var> encode(const EncoderConfig& cfg, const BoundParams& params, const Adjacency& adj,
                            std::optional<ad::Var> edge_weights, ad::Var x) {
  cfg.validate();
  require(x.rows() == adj.num_nodes, "encode: feature rows do not match the adjacency");
  require(x.cols() == cfg.input_dim,
          fmt::format("encode: features have {} columns, encoder expects {}", x.cols(), cfg.input_dim));
  std::vector<ad::Var> states;
  states.reserve(cfg.num_layers);
  ad::Var h = x;
  for (std::size_t k = 0; k < cfg.num_layers; ++k) {
    ad::Var z;
    if (cfg.kind == EncoderKind::kGcn) {
      const ad::Var agg = ad::spmm_weighted(adj, edge_weights, h);
      z = ad::add_bias(ad::matmul(agg, params[encoder_param_name(k, "weight")]),
                       params[encoder_param_name(k, "bias")]);
    } else {
      const ad::Var eps = params.contains(encoder_param_name(k, "eps"))
                              ? params[encoder_param_name(k, "eps")]
                              : x.tape().constant(Matrix(1, 1, cfg.gin_eps));
      const ad::Var self = ad::add(h, ad::scale_by(h, eps));
      const ad::Var agg = ad::add(self, ad::spmm_weighted(adj, edge_weights, h, ad::Aggregation::kNeighborSum));
      const ad::Var mid = ad::relu(ad::add_bias(ad::matmul(agg, params[encoder_param_name(k, "mlp0.weight")]),
                                                params[encoder_param_name(k, "mlp0.bias")]));
      z = ad::add_bias(ad::matmul(mid, params[encoder_param_name(k, "mlp1.weight")]),
                       params[encoder_param_name(k, "mlp1.bias")]);
    }
    h = activate(cfg.activation, z, params, k);
    states.push_back(h);
  }
  return states;
}

ad::Var readout(std::span<const ad::Var> hidden_states, std::span<const std::size_t> graph_ids,
                std::size_t num_graphs) {
  require(!hidden_states.empty(), "readout: no hidden states");
  std::vector<ad::Var> pooled;
  pooled.reserve(hidden_states.size());
  for (const auto& h : hidden_states) {
    require(h.rows() == hidden_states.front().rows(), "readout: layers disagree on row count");
    pooled.push_back(ad::segment_sum(h, graph_ids, num_graphs));
  }
  return ad::concat_cols(pooled);
}

}  // namespace fastgcl
