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

#include "autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace fastgcl::ad {

namespace {

constexpr double kCosineNormFloor = 1e-12;

void check_same_tape(Var a, Var b) {
  require(a.valid() && b.valid() && &a.tape() == &b.tape(), "vars belong to different tapes");
}

void check_same_shape(Var a, Var b, const char* op) {
  require(a.value().same_shape(b.value()), std::string(op) + ": shape mismatch " + a.value().shape_str() +
                                               " vs " + b.value().shape_str());
}

// Accumulate g into v's adjoint when v participates in differentiation.
void add_into(Tape& t, Var v, const Matrix& g) {
  if (!t.requires_grad(v)) return;
  auto& acc = t.accumulate(v);
  for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
}

template <typename F>
Matrix map(const Matrix& a, F f) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f(a[i]);
  return out;
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(*this); }
bool Var::requires_grad() const { return tape_->requires_grad(*this); }

Var Tape::constant(Matrix value) { return record(std::move(value), std::span<const Var>{}, nullptr); }

Var Tape::parameter(Matrix value) {
  require(value.all_finite(), "parameter contains non-finite values");
  nodes_.push_back(Node{std::move(value), Matrix(), true, false, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, Backward backward) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(backward));
}

Var Tape::record(Matrix value, std::span<const Var> inputs, Backward backward) {
  if (!value.all_finite()) fail(ErrorCode::kNonFinite, "non-finite value produced on tape");
  bool needs = false;
  for (const auto& in : inputs) {
    require(in.tape_ == this, "input var belongs to a different tape");
    needs = needs || nodes_[in.id_].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), Matrix(), needs, false, needs ? std::move(backward) : Backward()});
  return Var(this, nodes_.size() - 1);
}

Matrix Tape::grad(Var v) const {
  const auto& n = nodes_[v.id_];
  if (n.has_grad) return n.grad;
  return Matrix(n.value.rows(), n.value.cols());
}

Matrix& Tape::accumulate(Var v) {
  auto& n = nodes_[v.id_];
  if (!n.has_grad) {
    n.grad = Matrix(n.value.rows(), n.value.cols());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var loss) {
  require(loss.tape_ == this, "loss belongs to a different tape");
  require(value(loss).rows() == 1 && value(loss).cols() == 1, "backward requires a 1x1 loss");
  for (auto& n : nodes_) {
    n.has_grad = false;
    n.grad = Matrix();
  }
  if (!requires_grad(loss)) return;
  accumulate(loss)[0] = 1.0;
  for (std::size_t i = loss.id_ + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (!n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad);
  }
}

Var matmul(Var a, Var b) {
  check_same_tape(a, b);
  require(a.cols() == b.rows(),
          "matmul shape mismatch: " + a.value().shape_str() + " * " + b.value().shape_str());
  return a.tape().record(fastgcl::matmul(a.value(), b.value()), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (a.requires_grad()) add_into(t, a, matmul_a_bt(g, b.value()));
    if (b.requires_grad()) add_into(t, b, matmul_at_b(a.value(), g));
  });
}

Var add(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "add");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    add_into(t, a, g);
    add_into(t, b, g);
  });
}

Var sub(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "sub");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    add_into(t, a, g);
    if (b.requires_grad()) add_into(t, b, map(g, [](double x) { return -x; }));
  });
}

Var mul(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "mul");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const Matrix& g) {
    if (a.requires_grad()) {
      Matrix ga = g;
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= b.value()[i];
      add_into(t, a, ga);
    }
    if (b.requires_grad()) {
      Matrix gb = g;
      for (std::size_t i = 0; i < gb.size(); ++i) gb[i] *= a.value()[i];
      add_into(t, b, gb);
    }
  });
}

Var add_bias(Var a, Var bias) {
  check_same_tape(a, bias);
  require(bias.rows() == 1 && bias.cols() == a.cols(), "add_bias: bias must be 1x" + std::to_string(a.cols()));
  Matrix out = a.value();
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bias.value()(0, c);
  return a.tape().record(std::move(out), {a, bias}, [a, bias](Tape& t, const Matrix& g) {
    add_into(t, a, g);
    if (bias.requires_grad()) {
      Matrix gb(1, g.cols());
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
      add_into(t, bias, gb);
    }
  });
}

Var scale(Var a, double s) { return affine(a, s, 0.0); }

Var affine(Var a, double alpha, double beta) {
  Matrix out = map(a.value(), [=](double x) { return alpha * x + beta; });
  return a.tape().record(std::move(out), {a}, [a, alpha](Tape& t, const Matrix& g) {
    add_into(t, a, map(g, [=](double x) { return alpha * x; }));
  });
}

Var scale_by(Var a, Var s) {
  check_same_tape(a, s);
  require(s.rows() == 1 && s.cols() == 1, "scale_by: scale must be 1x1");
  const double k = s.value()[0];
  Matrix out = map(a.value(), [=](double x) { return k * x; });
  return a.tape().record(std::move(out), {a, s}, [a, s](Tape& t, const Matrix& g) {
    const double k = s.value()[0];
    if (a.requires_grad()) add_into(t, a, map(g, [=](double x) { return k * x; }));
    if (s.requires_grad()) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * a.value()[i];
      add_into(t, s, Matrix(1, 1, acc));
    }
  });
}

Var relu(Var a) {
  Matrix out = map(a.value(), [](double x) { return x > 0.0 ? x : 0.0; });
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    Matrix ga = g;
    for (std::size_t i = 0; i < ga.size(); ++i)
      if (!(a.value()[i] > 0.0)) ga[i] = 0.0;
    add_into(t, a, ga);
  });
}

Var prelu(Var a, Var slope) {
  check_same_tape(a, slope);
  require(slope.rows() == 1 && slope.cols() == 1, "prelu: slope must be 1x1");
  const double k = slope.value()[0];
  Matrix out = map(a.value(), [=](double x) { return x > 0.0 ? x : k * x; });
  return a.tape().record(std::move(out), {a, slope}, [a, slope](Tape& t, const Matrix& g) {
    const double k = slope.value()[0];
    const auto& x = a.value();
    if (a.requires_grad()) {
      Matrix ga = g;
      for (std::size_t i = 0; i < ga.size(); ++i)
        if (!(x[i] > 0.0)) ga[i] *= k;
      add_into(t, a, ga);
    }
    if (slope.requires_grad()) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i)
        if (!(x[i] > 0.0)) acc += g[i] * x[i];
      add_into(t, slope, Matrix(1, 1, acc));
    }
  });
}

Var sigmoid(Var a) {
  Matrix out = map(a.value(), stable_sigmoid);
  const Matrix s = out;
  return a.tape().record(std::move(out), {a}, [a, s](Tape& t, const Matrix& g) {
    Matrix ga = g;
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= s[i] * (1.0 - s[i]);
    add_into(t, a, ga);
  });
}

Var log(Var a) {
  for (std::size_t i = 0; i < a.value().size(); ++i)
    require(a.value()[i] > 0.0, "log of non-positive value");
  Matrix out = map(a.value(), [](double x) { return std::log(x); });
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    Matrix ga = g;
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] /= a.value()[i];
    add_into(t, a, ga);
  });
}

Var softplus(Var a) {
  Matrix out = map(a.value(), [](double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); });
  return a.tape().record(std::move(out), {a}, [a](Tape& t, const Matrix& g) {
    Matrix ga = g;
    for (std::size_t i = 0; i < ga.size(); ++i) ga[i] *= stable_sigmoid(a.value()[i]);
    add_into(t, a, ga);
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  return a.tape().record(Matrix(1, 1, s), {a}, [a](Tape& t, const Matrix& g) {
    add_into(t, a, Matrix(a.rows(), a.cols(), g[0]));
  });
}

Var mean(Var a) {
  require(a.value().size() > 0, "mean of an empty tensor");
  const double n = static_cast<double>(a.value().size());
  double s = 0.0;
  for (double x : a.value().data()) s += x;
  return a.tape().record(Matrix(1, 1, s / n), {a}, [a, n](Tape& t, const Matrix& g) {
    add_into(t, a, Matrix(a.rows(), a.cols(), g[0] / n));
  });
}

Var row_cosine(Var a, Var b) {
  check_same_tape(a, b);
  check_same_shape(a, b, "row_cosine");
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  Matrix out(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = a.value().row(i);
    const auto y = b.value().row(i);
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dot += x[k] * y[k];
      nx += x[k] * x[k];
      ny += y[k] * y[k];
    }
    if (std::sqrt(nx) < kCosineNormFloor || std::sqrt(ny) < kCosineNormFloor) continue;
    // sqrt(nx·ny) rather than sqrt(nx)·sqrt(ny): identical rows give exactly 1.
    out(i, 0) = dot / std::sqrt(nx * ny);
  }
  const Matrix cos = out;
  return a.tape().record(std::move(out), {a, b}, [a, b, cos](Tape& t, const Matrix& g) {
    const std::size_t n = a.rows();
    const std::size_t d = a.cols();
    Matrix ga(n, d), gb(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto x = a.value().row(i);
      const auto y = b.value().row(i);
      double nx = 0.0, ny = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        nx += x[k] * x[k];
        ny += y[k] * y[k];
      }
      if (std::sqrt(nx) < kCosineNormFloor || std::sqrt(ny) < kCosineNormFloor) continue;
      const double inv = 1.0 / std::sqrt(nx * ny);
      const double c = cos(i, 0);
      const double gi = g(i, 0);
      for (std::size_t k = 0; k < d; ++k) {
        ga(i, k) = gi * (y[k] * inv - c * x[k] / nx);
        gb(i, k) = gi * (x[k] * inv - c * y[k] / ny);
      }
    }
    add_into(t, a, ga);
    add_into(t, b, gb);
  });
}

Var segment_sum(Var h, std::span<const std::size_t> segment_ids, std::size_t num_segments) {
  require(segment_ids.size() == h.rows(), "segment_sum: one segment id per row required");
  Matrix out(num_segments, h.cols());
  for (std::size_t r = 0; r < h.rows(); ++r) {
    const std::size_t s = segment_ids[r];
    require(s < num_segments, "segment_sum: segment id out of range");
    const auto src = h.value().row(r);
    auto dst = out.row(s);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
  }
  std::vector<std::size_t> ids(segment_ids.begin(), segment_ids.end());
  return h.tape().record(std::move(out), {h}, [h, ids = std::move(ids)](Tape& t, const Matrix& g) {
    Matrix gh(h.rows(), h.cols());
    for (std::size_t r = 0; r < ids.size(); ++r) {
      const auto src = g.row(ids[r]);
      std::copy(src.begin(), src.end(), gh.row(r).begin());
    }
    add_into(t, h, gh);
  });
}

Var concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat_cols: empty list");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    check_same_tape(parts.front(), p);
    require(p.rows() == rows, "concat_cols: row count mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r) {
      const auto src = p.value().row(r);
      std::copy(src.begin(), src.end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(off));
    }
    off += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape().record(std::move(out), parts, [inputs](Tape& t, const Matrix& g) {
    std::size_t off = 0;
    for (const auto& p : inputs) {
      if (p.requires_grad()) {
        Matrix gp(p.rows(), p.cols());
        for (std::size_t r = 0; r < p.rows(); ++r)
          for (std::size_t c = 0; c < p.cols(); ++c) gp(r, c) = g(r, off + c);
        add_into(t, p, gp);
      }
      off += p.cols();
    }
  });
}

Var spmm_weighted(const Adjacency& adj, std::optional<Var> edge_weights, Var h, Aggregation mode) {
  require(h.rows() == adj.num_nodes,
          "spmm_weighted: h has " + std::to_string(h.rows()) + " rows, graph has " + std::to_string(adj.num_nodes));
  const double* w = nullptr;
  if (edge_weights) {
    check_same_tape(*edge_weights, h);
    const Matrix& wm = edge_weights->value();
    require(wm.cols() == 1 && wm.rows() == adj.num_edge_slots,
            "spmm_weighted: expected " + std::to_string(adj.num_edge_slots) + "x1 edge weights, got " + wm.shape_str());
    for (double x : wm.data()) require(x >= 0.0 && x <= 1.0, "spmm_weighted: edge weight outside [0,1]");
    w = wm.data().data();
  }
  const bool neighbor_sum = mode == Aggregation::kNeighborSum;
  const std::size_t d = h.cols();
  Matrix out(adj.num_nodes, d);
  const Matrix& hv = h.value();
  for (std::size_t v = 0; v < adj.num_nodes; ++v) {
    double* dst = out.data().data() + v * d;
    for (std::size_t e = adj.row_ptr[v]; e < adj.row_ptr[v + 1]; ++e) {
      if (neighbor_sum && adj.edge_slot[e] < 0) continue;
      double c = neighbor_sum ? 1.0 : adj.coeff[e];
      if (w && adj.edge_slot[e] >= 0) c *= w[adj.edge_slot[e]];
      const double* src = hv.data().data() + adj.col_idx[e] * d;
      for (std::size_t k = 0; k < d; ++k) dst[k] += c * src[k];
    }
  }
  const Adjacency* a = &adj;
  auto backward = [a, edge_weights, h, neighbor_sum](Tape& t, const Matrix& g) {
    const std::size_t d = h.cols();
    const double* w = edge_weights ? edge_weights->value().data().data() : nullptr;
    if (h.requires_grad()) {
      Matrix gh(h.rows(), d);
      for (std::size_t v = 0; v < a->num_nodes; ++v) {
        const double* gv = g.data().data() + v * d;
        for (std::size_t e = a->row_ptr[v]; e < a->row_ptr[v + 1]; ++e) {
          if (neighbor_sum && a->edge_slot[e] < 0) continue;
          double c = neighbor_sum ? 1.0 : a->coeff[e];
          if (w && a->edge_slot[e] >= 0) c *= w[a->edge_slot[e]];
          double* dst = gh.data().data() + a->col_idx[e] * d;
          for (std::size_t k = 0; k < d; ++k) dst[k] += c * gv[k];
        }
      }
      add_into(t, h, gh);
    }
    if (edge_weights && edge_weights->requires_grad()) {
      Matrix gw(a->num_edge_slots, 1);
      for (std::size_t v = 0; v < a->num_nodes; ++v) {
        const double* gv = g.data().data() + v * d;
        for (std::size_t e = a->row_ptr[v]; e < a->row_ptr[v + 1]; ++e) {
          if (a->edge_slot[e] < 0) continue;
          const double* hu = h.value().data().data() + a->col_idx[e] * d;
          double dot = 0.0;
          for (std::size_t k = 0; k < d; ++k) dot += gv[k] * hu[k];
          gw[static_cast<std::size_t>(a->edge_slot[e])] += (neighbor_sum ? 1.0 : a->coeff[e]) * dot;
        }
      }
      if (t.corrupt_adjoints())
        for (auto& x : gw.data()) x *= 1.5;
      add_into(t, *edge_weights, gw);
    }
  };
  if (edge_weights) return h.tape().record(std::move(out), {h, *edge_weights}, std::move(backward));
  return h.tape().record(std::move(out), {h}, std::move(backward));
}

Var pair_dot(Var z, std::span<const std::size_t> left, std::span<const std::size_t> right) {
  require(left.size() == right.size(), "pair_dot: index lists differ in length");
  const std::size_t d = z.cols();
  Matrix out(left.size(), 1);
  for (std::size_t e = 0; e < left.size(); ++e) {
    require(left[e] < z.rows() && right[e] < z.rows(), "pair_dot: index out of range");
    const auto a = z.value().row(left[e]);
    const auto b = z.value().row(right[e]);
    double s = 0.0;
    for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
    out(e, 0) = s;
  }
  std::vector<std::size_t> l(left.begin(), left.end()), r(right.begin(), right.end());
  return z.tape().record(std::move(out), {z}, [z, l = std::move(l), r = std::move(r)](Tape& t, const Matrix& g) {
    const std::size_t d = z.cols();
    Matrix gz(z.rows(), d);
    for (std::size_t e = 0; e < l.size(); ++e) {
      const auto a = z.value().row(l[e]);
      const auto b = z.value().row(r[e]);
      auto ga = gz.row(l[e]);
      for (std::size_t k = 0; k < d; ++k) ga[k] += g[e] * b[k];
      auto gb = gz.row(r[e]);
      for (std::size_t k = 0; k < d; ++k) gb[k] += g[e] * a[k];
    }
    add_into(t, z, gz);
  });
}

}  // namespace fastgcl::ad
