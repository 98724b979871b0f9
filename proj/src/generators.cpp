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

#include "generators.hpp"

#include <cmath>
#include <numeric>

#include "common.hpp"

namespace fastgcl {

void SbmSpec::validate() const {
  require(p_in >= 0.0 && p_in <= 1.0, "p_in must lie in [0,1]");
  require(p_out >= 0.0 && p_out <= 1.0, "p_out must lie in [0,1]");
  require(!block_sizes.empty(), "block_sizes must be nonempty");
  for (auto b : block_sizes) require(b >= 1, "every block needs at least one node");
  require(feature_dim >= 1, "feature_dim must be >= 1");
}

Graph generate_sbm(const SbmSpec& spec) {
  spec.validate();
  const std::size_t n = std::accumulate(spec.block_sizes.begin(), spec.block_sizes.end(), std::size_t{0});
  require(n > 0, "SBM has zero nodes");
  Rng rng(spec.seed);

  std::vector<int> block(n);
  std::size_t v = 0;
  for (std::size_t b = 0; b < spec.block_sizes.size(); ++b)
    for (std::size_t i = 0; i < spec.block_sizes[b]; ++i) block[v++] = static_cast<int>(b);

  EdgeList edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = block[i] == block[j] ? spec.p_in : spec.p_out;
      if (rng.uniform() < p) edges.emplace_back(i, j);
    }
  }

  const std::size_t f = spec.feature_dim;
  Matrix means(spec.block_sizes.size(), f);
  for (std::size_t b = 0; b < means.rows(); ++b) {
    double norm2 = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
      means(b, j) = rng.normal();
      norm2 += means(b, j) * means(b, j);
    }
    const double scale = norm2 > 0.0 ? spec.feature_signal / std::sqrt(norm2) : 0.0;
    for (std::size_t j = 0; j < f; ++j) means(b, j) *= scale;
  }
  Matrix x(n, f);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) x(i, j) = means(static_cast<std::size_t>(block[i]), j) + rng.normal();

  return Graph::from_edges(n, edges, std::move(x), std::move(block));
}

void MotifSpec::validate() const {
  require(num_graphs >= 1, "num_graphs must be >= 1");
  require(min_motifs >= 1 && min_motifs <= max_motifs, "need 1 <= min_motifs <= max_motifs");
}

Graph GraphDataset::to_batch() const {
  Graph b = batch_graphs(graphs);
  return Graph::from_edges(b.num_nodes(), [&] {
    EdgeList e;
    for (std::size_t v = 0; v < b.num_nodes(); ++v)
      for (auto u : b.neighbors(v))
        if (v < u) e.emplace_back(v, u);
    return e;
  }(), b.features(), labels, b.graph_ids());
}

GraphDataset GraphDataset::from_batch(const Graph& batch) {
  require(batch.has_graph_ids(), "graph dataset requires graph_ids");
  GraphDataset ds;
  ds.graphs = unbatch(batch);
  if (batch.labels().size() == ds.graphs.size()) ds.labels = batch.labels();
  return ds;
}

GraphDataset generate_motif_dataset(const MotifSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  GraphDataset ds;
  for (std::size_t gi = 0; gi < spec.num_graphs; ++gi) {
    const int label = static_cast<int>(gi % 2);
    const std::size_t motifs =
        spec.min_motifs + static_cast<std::size_t>(rng.below(spec.max_motifs - spec.min_motifs + 1));
    EdgeList edges;
    std::vector<std::pair<std::size_t, std::size_t>> spans;  // [first, last) node range per motif
    std::size_t n = 0;
    for (std::size_t m = 0; m < motifs; ++m) {
      const std::size_t first = n;
      if (label == 0) {
        const std::size_t len = 3 + static_cast<std::size_t>(rng.below(4));  // 3..6 nodes
        for (std::size_t i = 0; i < len; ++i) edges.emplace_back(first + i, first + (i + 1) % len);
        n += len;
      } else {
        const std::size_t leaves = 2 + static_cast<std::size_t>(rng.below(4));  // 3..6 nodes
        for (std::size_t i = 1; i <= leaves; ++i) edges.emplace_back(first, first + i);
        n += leaves + 1;
      }
      spans.emplace_back(first, n);
    }
    for (std::size_t m = 1; m < spans.size(); ++m) {
      const auto [a0, a1] = spans[m - 1];
      const auto [b0, b1] = spans[m];
      edges.emplace_back(a0 + rng.below(a1 - a0), b0 + rng.below(b1 - b0));
    }
    for (std::size_t k = 0; k < spec.noise_edges && n > 1; ++k) {
      const std::size_t u = rng.below(n);
      const std::size_t v = rng.below(n);
      edges.emplace_back(u, v);
    }
    ds.graphs.push_back(Graph::from_edges(n, edges, Matrix(n, 1, 1.0)));
    ds.labels.push_back(label);
  }
  return ds;
}

}  // namespace fastgcl
