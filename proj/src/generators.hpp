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
#include <vector>

#include "graph.hpp"

namespace fastgcl {

struct SbmSpec {
  std::vector<std::size_t> block_sizes{30, 30};
  double p_in = 0.3;
  double p_out = 0.02;
  std::size_t feature_dim = 16;
  // Distance of each community mean from the origin, in units of the
  // per-coordinate noise standard deviation.
  double feature_signal = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Stochastic block model. Nodes are laid out block by block and labelled
/// with their block index.
Graph generate_sbm(const SbmSpec& spec);

/// Graph classification set built from cycle motifs (class 0) and star
/// motifs (class 1) chained by bridge edges, plus random noise edges. Node
/// features are the constant 1-dimensional unit vector.
struct MotifSpec {
  std::size_t num_graphs = 100;
  std::size_t min_motifs = 2;
  std::size_t max_motifs = 4;
  std::size_t noise_edges = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct GraphDataset {
  std::vector<Graph> graphs;
  std::vector<int> labels;

  std::size_t size() const { return graphs.size(); }
  /// Single batched graph with graph-level labels, for saving.
  Graph to_batch() const;
  static GraphDataset from_batch(const Graph& batch);
};

GraphDataset generate_motif_dataset(const MotifSpec& spec);

}  // namespace fastgcl
