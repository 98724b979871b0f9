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

// Reverse-mode differentiation over dense matrices.
//
// A Tape records every operation executed on its Vars in order. backward()
// walks the records in reverse, handing each node its accumulated adjoint;
// adjoints of a Var consumed several times add up. A tape is built for one
// forward/backward pass and then discarded. All reductions run in a fixed
// sequential order, so gradients are bit-reproducible.

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "graph.hpp"
#include "matrix.hpp"

namespace fastgcl::ad {

class Tape;

/// Handle to a value recorded on a Tape.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  bool requires_grad() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Receives this node's adjoint; adds into inputs through accumulate().
  using Backward = std::function<void(Tape&, const Matrix&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var parameter(Matrix value);

  /// Records an op output. The node requires grad iff any input does; the
  /// backward closure is dropped otherwise. Non-finite outputs throw.
  Var record(Matrix value, std::initializer_list<Var> inputs, Backward backward);
  Var record(Matrix value, std::span<const Var> inputs, Backward backward);

  /// Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be 1×1.
  void backward(Var loss);

  const Matrix& value(Var v) const { return nodes_[v.id_].value; }
  bool requires_grad(Var v) const { return nodes_[v.id_].requires_grad; }
  /// Accumulated adjoint; zeros if backward never reached v.
  Matrix grad(Var v) const;
  /// Adjoint buffer for v, allocated on first use. Only valid while
  /// requires_grad(v).
  Matrix& accumulate(Var v);

  std::size_t size() const { return nodes_.size(); }

  // Negative-control hook: scales the edge-weight adjoint of spmm_weighted.
  void set_corrupt_adjoints(bool on) { corrupt_adjoints_ = on; }
  bool corrupt_adjoints() const { return corrupt_adjoints_; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool has_grad = false;
    Backward backward;
  };

  std::deque<Node> nodes_;
  bool corrupt_adjoints_ = false;
};

// Dense algebra.
Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var add_bias(Var a, Var bias);  // bias is 1×cols, added to every row
Var scale(Var a, double s);
Var scale_by(Var a, Var s);  // s is 1×1
Var affine(Var a, double alpha, double beta);  // alpha·a + beta

// Pointwise nonlinearities.
Var relu(Var a);
Var prelu(Var a, Var slope);  // slope is 1×1
Var sigmoid(Var a);
Var log(Var a);  // throws on non-positive input
Var softplus(Var a);

// Reductions.
Var sum(Var a);
Var mean(Var a);

/// Per-row cosine similarity, N×1. Rows where either norm is below 1e-12
/// produce 0 with zero gradient.
Var row_cosine(Var a, Var b);

/// out[g] = sum of rows of h with segment id g. Empty segments are zero.
Var segment_sum(Var h, std::span<const std::size_t> segment_ids, std::size_t num_segments);

Var concat_cols(std::span<const Var> parts);

enum class Aggregation {
  kNormalized,   // every entry, scaled by its coefficient
  kNeighborSum,  // neighbor entries only, unit coefficient (GIN)
};

/// out[v] = Σ_{entries (u→v)} coeff·w·h[u]. `edge_weights` holds one value
/// per edge slot (num_edge_slots × 1); self-loops and std::nullopt use
/// weight 1. `adj` must outlive the backward pass.
Var spmm_weighted(const Adjacency& adj, std::optional<Var> edge_weights, Var h,
                  Aggregation mode = Aggregation::kNormalized);

/// out[e] = ⟨z[left[e]], z[right[e]]⟩, one row per pair.
Var pair_dot(Var z, std::span<const std::size_t> left, std::span<const std::size_t> right);

}  // namespace fastgcl::ad
