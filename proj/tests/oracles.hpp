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

// Reference implementations used by the tests. Nothing here calls into the
// code under test except for plain data accessors, so each oracle is an
// independent computation of the quantity being checked.

#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "common.hpp"
#include "encoder.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "params.hpp"

namespace oracle {

using fastgcl::Graph;
using fastgcl::Matrix;

/// Dense 0/1 adjacency built from the CSR arrays.
inline std::vector<std::vector<double>> dense_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t v = 0; v < n; ++v)
    for (auto u : g.neighbors(v)) a[v][u] = 1.0;
  return a;
}

/// D̃^{-1/2}(A+I)D̃^{-1/2} by the textbook dense formula: diagonal matrices
/// multiplied out explicitly.
inline Matrix dense_normalized(const Graph& g) {
  const std::size_t n = g.num_nodes();
  auto a = dense_adjacency(g);
  for (std::size_t i = 0; i < n; ++i) a[i][i] += 1.0;
  std::vector<double> dinv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) d += a[i][j];
    dinv[i] = 1.0 / std::sqrt(d);
  }
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = dinv[i] * a[i][j] * dinv[j];
  return out;
}

/// Naive triple loop, k innermost-last so that each output entry is the sum
/// over k in ascending order starting from 0.
inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

/// Dense matrix times dense matrix where `m` multiplies from the left.
inline Matrix dense_apply(const Matrix& m, const Matrix& h) { return naive_matmul(m, h); }

/// Central-difference gradient of a scalar function of one matrix.
inline Matrix numeric_gradient(const std::function<double(const Matrix&)>& f, Matrix x, double eps = 1e-6) {
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + eps;
    const double up = f(x);
    x[i] = keep - eps;
    const double down = f(x);
    x[i] = keep;
    g[i] = (up - down) / (2.0 * eps);
  }
  return g;
}

inline double max_rel_error(const Matrix& analytic, const Matrix& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / std::max(1.0, std::abs(numeric[i])));
  return worst;
}

inline Matrix random_matrix(std::size_t r, std::size_t c, fastgcl::Rng& rng, double scale = 1.0) {
  Matrix m(r, c);
  for (auto& v : m.data()) v = scale * rng.normal();
  return m;
}

/// Erdős–Rényi graph with Gaussian features, built from an explicit edge
/// list so its structure does not depend on any generator under test.
inline Graph random_graph(std::size_t n, double p, std::size_t f, std::uint64_t seed) {
  fastgcl::Rng rng(seed);
  fastgcl::EdgeList edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.emplace_back(i, j);
  return Graph::from_edges(n, edges, random_matrix(n, f, rng));
}

/// Per-row MLP forward equivalent to the encoder over a self-loop-only
/// graph: each row is pushed through the layer stack on its own, with the
/// same arithmetic order as a dense matmul (sum over k from 0).
inline Matrix mlp_reference(const fastgcl::EncoderConfig& cfg, const fastgcl::ParamSet& p, const Matrix& x) {
  using fastgcl::encoder_param_name;
  auto act = [&](double z, std::size_t k) {
    switch (cfg.activation) {
      case fastgcl::Activation::kPrelu: {
        const double s = p.at(encoder_param_name(k, "slope"))[0];
        return z > 0.0 ? z : s * z;
      }
      case fastgcl::Activation::kRelu:
        return z > 0.0 ? z : 0.0;
      case fastgcl::Activation::kIdentity:
        return z;
    }
    return z;
  };
  auto linear = [](const std::vector<double>& in, const Matrix& w, const Matrix& b) {
    std::vector<double> out(w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < w.rows(); ++k) s += in[k] * w(k, j);
      out[j] = s + b(0, j);
    }
    return out;
  };
  Matrix out;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::vector<double> h(x.row(r).begin(), x.row(r).end());
    for (std::size_t k = 0; k < cfg.num_layers; ++k) {
      std::vector<double> z;
      if (cfg.kind == fastgcl::EncoderKind::kGcn) {
        z = linear(h, p.at(encoder_param_name(k, "weight")), p.at(encoder_param_name(k, "bias")));
      } else {
        const double eps = p.contains(encoder_param_name(k, "eps")) ? p.at(encoder_param_name(k, "eps"))[0]
                                                                     : cfg.gin_eps;
        std::vector<double> self(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) self[i] = (h[i] + h[i] * eps) + 0.0;
        auto mid = linear(self, p.at(encoder_param_name(k, "mlp0.weight")), p.at(encoder_param_name(k, "mlp0.bias")));
        for (auto& m : mid) m = m > 0.0 ? m : 0.0;
        z = linear(mid, p.at(encoder_param_name(k, "mlp1.weight")), p.at(encoder_param_name(k, "mlp1.bias")));
      }
      for (auto& v : z) v = act(v, k);
      h = std::move(z);
    }
    if (out.empty()) out = Matrix(x.rows(), h.size());
    for (std::size_t j = 0; j < h.size(); ++j) out(r, j) = h[j];
  }
  return out;
}

}  // namespace oracle
