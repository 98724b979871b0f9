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

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "matrix.hpp"

namespace fastgcl {

using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

/// Undirected graph in CSR form. Every undirected edge is stored as two
/// directed entries, rows are sorted by column, and there are no self-loops
/// or duplicates. Immutable once built.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an arbitrary edge list: pairs are symmetrized,
  /// deduplicated, and self-loops are dropped. `labels` may be empty, of
  /// length N (node labels) or of length G when `graph_ids` is given.
  static Graph from_edges(std::size_t num_nodes, const EdgeList& edges, Matrix features,
                          std::vector<int> labels = {},
                          std::vector<std::size_t> graph_ids = {});

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_edges() const { return col_idx_.size() / 2; }
  std::size_t num_directed_edges() const { return col_idx_.size(); }
  std::size_t feature_dim() const { return features_.cols(); }
  std::size_t degree(std::size_t v) const { return row_ptr_[v + 1] - row_ptr_[v]; }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  std::span<const std::size_t> neighbors(std::size_t v) const {
    return {col_idx_.data() + row_ptr_[v], degree(v)};
  }
  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::size_t>& graph_ids() const { return graph_ids_; }
  bool has_labels() const { return !labels_.empty(); }
  bool has_graph_ids() const { return !graph_ids_.empty(); }

  /// Number of graphs in a batch; 1 when graph_ids are absent.
  std::size_t num_graphs() const;

  /// Source node of each directed entry, aligned with col_idx.
  std::vector<std::size_t> entry_rows() const;

  /// Index of the directed entry (v -> u) that mirrors entry e = (u -> v).
  std::vector<std::size_t> mirror_entries() const;

  /// Throws if any structural invariant is violated.
  void validate() const;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::size_t> graph_ids_;
};

/// Propagation operator in CSR form. Row v lists the entries u whose
/// representations flow into v, weighted by `coeff`. `edge_slot` maps each
/// entry to the source graph's directed-entry index, or -1 for a self-loop.
struct Adjacency {
  std::size_t num_nodes = 0;
  std::size_t num_edge_slots = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_idx;
  std::vector<double> coeff;
  std::vector<std::ptrdiff_t> edge_slot;

  std::size_t num_entries() const { return col_idx.size(); }

  /// Dense N×N matrix with out = dense · H, optionally scaling each edge
  /// entry by `edge_weights[edge_slot]`.
  Matrix to_dense(std::span<const double> edge_weights = {}) const;
};

/// D̃^{-1/2}(A+I)D̃^{-1/2}, with a self-loop entry in every row.
Adjacency normalize(const Graph& g);

/// Self-loops only, coefficient exactly 1: propagation is the identity.
Adjacency identity_view(const Graph& g);

/// The neighbor entries of `adj` with unit coefficients and no self-loops
/// (the un-normalized sum used by GIN).
Adjacency neighbor_sum_view(const Adjacency& adj);

/// Disjoint union with node-id offsets; graph_ids record membership.
Graph batch_graphs(std::span<const Graph> graphs);

/// Inverse of batch_graphs for a graph carrying graph_ids. Per-graph labels
/// are not carried over; callers read them from the batch.
std::vector<Graph> unbatch(const Graph& batch);

// CSV dataset directory: edges.csv, features.csv, optional labels.csv and
// graph_ids.csv. Loading symmetrizes and deduplicates edges.
Graph load_graph(const std::filesystem::path& dir);
void save_graph(const Graph& g, const std::filesystem::path& dir);

}  // namespace fastgcl
