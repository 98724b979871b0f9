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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autodiff.hpp"
#include "graph.hpp"
#include "params.hpp"

namespace fastgcl {

enum class EncoderKind { kGcn, kGin };
enum class Activation { kPrelu, kRelu, kIdentity };

EncoderKind parse_encoder_kind(std::string_view s);
Activation parse_activation(std::string_view s);
std::string to_string(EncoderKind k);
std::string to_string(Activation a);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kGcn;
  std::size_t num_layers = 2;
  std::size_t input_dim = 1;
  std::size_t hidden_dim = 32;
  Activation activation = Activation::kPrelu;
  double gin_eps = 0.0;
  bool gin_train_eps = true;
  std::size_t mlp_hidden = 0;  // 0 selects hidden_dim

  std::size_t gin_mlp_hidden() const { return mlp_hidden ? mlp_hidden : hidden_dim; }
  void validate() const;
};

// Parameter names, shared by init, encode, and checkpoint validation.
//   GCN layer k: encoder.k.weight, encoder.k.bias
//   GIN layer k: encoder.k.mlp0.weight, .mlp0.bias, .mlp1.weight, .mlp1.bias,
//                encoder.k.eps (when learnable)
//   prelu:       encoder.k.slope
std::string encoder_param_name(std::size_t layer, std::string_view leaf);

/// Glorot-uniform weights, zero biases, prelu slopes 0.25, GIN ε = cfg.gin_eps.
ParamSet init_encoder_params(const EncoderConfig& cfg, std::uint64_t seed);

/// Checks names and shapes; throws Error(kCheckpoint) on mismatch.
void check_encoder_params(const EncoderConfig& cfg, const ParamSet& params);

/// Runs the shared encoder and returns every layer's output (K tensors).
///
/// GCN: h ← act(Â_w·h·W + b), with Â_w the normalized propagation scaled by
/// `edge_weights` on edge entries. GIN: h ← act(MLP((1+ε)·h + Σ_u w·h_u)),
/// summing neighbor entries only. std::nullopt means unit edge weights.
std::vector<ad::Var> encode(const EncoderConfig& cfg, const BoundParams& params, const Adjacency& adj,
                            std::optional<ad::Var> edge_weights, ad::Var x);

/// Layer-wise sum pooling per graph, concatenated across layers in order:
/// G × (K·d).
ad::Var readout(std::span<const ad::Var> hidden_states, std::span<const std::size_t> graph_ids,
                std::size_t num_graphs);

}  // namespace fastgcl
