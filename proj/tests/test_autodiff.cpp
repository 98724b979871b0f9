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

#include <doctest.h>

#include <cmath>

#include "autodiff.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace fastgcl;
using ad::Tape;
using ad::Var;

namespace {

using UnaryOp = std::function<Var(Var)>;

// Loss = Σ op(x) ⊙ r for a fixed random r, so every output entry carries a
// distinct adjoint.
double weighted_sum(const Matrix& out, const Matrix& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * r[i];
  return s;
}

double check_unary(const UnaryOp& op, const Matrix& x0, std::uint64_t seed) {
  Rng rng(seed);
  Matrix r;
  {
    Tape probe;
    const Matrix shape = op(probe.constant(x0)).value();
    r = oracle::random_matrix(shape.rows(), shape.cols(), rng);
  }
  Tape tape;
  const Var x = tape.parameter(x0);
  tape.backward(ad::sum(ad::mul(op(x), tape.constant(r))));
  const Matrix analytic = tape.grad(x);
  const Matrix numeric = oracle::numeric_gradient(
      [&](const Matrix& xv) {
        Tape t;
        return weighted_sum(op(t.constant(xv)).value(), r);
      },
      x0);
  return oracle::max_rel_error(analytic, numeric);
}

Matrix away_from_zero(Matrix m) {
  for (auto& v : m.data())
    if (std::abs(v) < 0.05) v = v < 0 ? -0.05 - v : 0.05 + v;
  return m;
}

}  // namespace

TEST_SUITE("tensor-autodiff") {
  TEST_CASE("matmul values") {
    Tape t;
    const Matrix a{{1, 2}, {3, 4}};
    CHECK(ad::matmul(t.constant(a), t.constant(Matrix::identity(2))).value() == a);
    CHECK(ad::matmul(t.constant(Matrix{{1, 2}}), t.constant(Matrix{{3}, {4}})).value() == Matrix{{11}});
    CHECK_THROWS(ad::matmul(t.constant(a), t.constant(Matrix(3, 1))));
  }

  TEST_CASE("matmul gradients match finite differences") {
    Rng rng(1);
    const Matrix a0 = oracle::random_matrix(4, 3, rng), b0 = oracle::random_matrix(3, 2, rng);
    const Matrix r = oracle::random_matrix(4, 2, rng);
    Tape t;
    const Var a = t.parameter(a0), b = t.parameter(b0);
    t.backward(ad::sum(ad::mul(ad::matmul(a, b), t.constant(r))));
    const Matrix na = oracle::numeric_gradient([&](const Matrix& x) { return weighted_sum(oracle::naive_matmul(x, b0), r); }, a0);
    const Matrix nb = oracle::numeric_gradient([&](const Matrix& x) { return weighted_sum(oracle::naive_matmul(a0, x), r); }, b0);
    CHECK(oracle::max_rel_error(t.grad(a), na) < 1e-6);
    CHECK(oracle::max_rel_error(t.grad(b), nb) < 1e-6);
  }

  TEST_CASE("pointwise values") {
    Tape t;
    CHECK(ad::sigmoid(t.constant(Matrix{{0.0}})).value()[0] == 0.5);
    const Matrix r = ad::relu(t.constant(Matrix{{-3.0, 2.0}})).value();
    CHECK(r == Matrix{{0.0, 2.0}});
    const Matrix p = ad::prelu(t.constant(Matrix{{-4.0, 3.0}}), t.constant(Matrix{{0.25}})).value();
    CHECK(p == Matrix{{-1.0, 3.0}});
    CHECK(ad::softplus(t.constant(Matrix{{0.0}})).value()[0] == doctest::Approx(std::log(2.0)));
    CHECK(ad::sigmoid(t.constant(Matrix{{-800.0, 800.0}})).value() == Matrix{{0.0, 1.0}});
    CHECK_THROWS(ad::log(t.constant(Matrix{{1.0, 0.0}})));
    CHECK_THROWS(ad::log(t.constant(Matrix{{-1.0}})));
    CHECK_THROWS(ad::add(t.constant(Matrix(2, 2)), t.constant(Matrix(2, 3))));
  }

  TEST_CASE("pointwise gradients over ten seeds") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed + 100);
      const Matrix x = away_from_zero(oracle::random_matrix(3, 4, rng));
      const Matrix y = oracle::random_matrix(3, 4, rng);
      Matrix pos = x;
      for (auto& v : pos.data()) v = std::abs(v) + 0.1;
      CHECK(check_unary([](Var v) { return ad::relu(v); }, x, seed) < 1e-6);
      CHECK(check_unary([](Var v) { return ad::sigmoid(v); }, x, seed) < 1e-6);
      CHECK(check_unary([](Var v) { return ad::softplus(v); }, x, seed) < 1e-6);
      CHECK(check_unary([](Var v) { return ad::log(v); }, pos, seed) < 1e-6);
      CHECK(check_unary([&](Var v) { return ad::add(v, v.tape().constant(y)); }, x, seed) < 1e-6);
      CHECK(check_unary([&](Var v) { return ad::sub(v.tape().constant(y), v); }, x, seed) < 1e-6);
      CHECK(check_unary([&](Var v) { return ad::mul(v, v.tape().constant(y)); }, x, seed) < 1e-6);
      CHECK(check_unary([](Var v) { return ad::mul(v, v); }, x, seed) < 1e-6);
      CHECK(check_unary([](Var v) { return ad::affine(v, -1.5, 0.25); }, x, seed) < 1e-6);
      CHECK(check_unary([](Var v) { return ad::prelu(v, v.tape().constant(Matrix{{0.3}})); }, x, seed) < 1e-6);
    }
  }

  TEST_CASE("prelu slope receives its gradient") {
    const Matrix x = away_from_zero(Matrix{{-2.0, 1.0, -0.5}, {3.0, -1.0, 0.7}});
    Tape t;
    const Var xs = t.constant(x);
    const Var s = t.parameter(Matrix{{0.25}});
    t.backward(ad::sum(ad::prelu(xs, s)));
    double expect = 0.0;
    for (double v : x.data())
      if (v <= 0.0) expect += v;
    CHECK(t.grad(s)[0] == doctest::Approx(expect));
    const Matrix num = oracle::numeric_gradient(
        [&](const Matrix& sv) {
          Tape u;
          return ad::sum(ad::prelu(u.constant(x), u.constant(sv))).value()[0];
        },
        Matrix{{0.25}});
    CHECK(oracle::max_rel_error(t.grad(s), num) < 1e-6);
  }

  TEST_CASE("row_cosine values and degenerate rows") {
    Tape t;
    const Matrix a{{1, 2, 3}, {0.5, -1, 2}};
    Matrix neg = a;
    for (auto& v : neg.data()) v = -v;
    const Matrix self = ad::row_cosine(t.constant(a), t.constant(a)).value();
    CHECK(self == Matrix{{1.0}, {1.0}});
    const Matrix anti = ad::row_cosine(t.constant(a), t.constant(neg)).value();
    CHECK(anti == Matrix{{-1.0}, {-1.0}});

    const Var z = t.parameter(Matrix{{0, 0, 0}, {1, 1, 1}});
    const Var b = t.parameter(Matrix{{1, 2, 3}, {1, 0, 0}});
    const Var c = ad::row_cosine(z, b);
    CHECK(c.value()[0] == 0.0);
    t.backward(ad::sum(c));
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(t.grad(z)(0, j) == 0.0);
      CHECK(t.grad(b)(0, j) == 0.0);
    }
    CHECK_THROWS(ad::row_cosine(t.constant(Matrix(2, 3)), t.constant(Matrix(2, 2))));
  }

  TEST_CASE("row_cosine gradients on random 6x4 pairs") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      Rng rng(seed);
      const Matrix other = oracle::random_matrix(6, 4, rng);
      const Matrix x = oracle::random_matrix(6, 4, rng);
      CHECK(check_unary([&](Var v) { return ad::row_cosine(v, v.tape().constant(other)); }, x, seed) < 1e-6);
      CHECK(check_unary([&](Var v) { return ad::row_cosine(v.tape().constant(other), v); }, x, seed) < 1e-6);
    }
  }

  TEST_CASE("segment_sum examples") {
    Tape t;
    const Matrix h{{1, 2}, {3, 4}};
    const std::vector<std::size_t> same{0, 0}, split{0, 1}, gap{0, 2};
    CHECK(ad::segment_sum(t.constant(h), same, 1).value() == Matrix{{4, 6}});
    CHECK(ad::segment_sum(t.constant(h), split, 2).value() == h);
    CHECK(ad::segment_sum(t.constant(h), gap, 3).value() == Matrix{{1, 2}, {0, 0}, {3, 4}});
    CHECK_THROWS(ad::segment_sum(t.constant(h), gap, 2));
    Rng rng(4);
    const std::vector<std::size_t> ids{1, 0, 1, 2, 0};
    CHECK(check_unary([&](Var v) { return ad::segment_sum(v, ids, 3); }, oracle::random_matrix(5, 3, rng), 4) < 1e-6);
  }

  TEST_CASE("concat_cols shapes and adjoint round trip") {
    Tape t;
    const Var a = t.parameter(Matrix{{1}, {2}});
    const Var b = t.parameter(Matrix{{3, 4}, {5, 6}});
    const std::vector<Var> parts{a, b};
    const Var c = ad::concat_cols(parts);
    CHECK(c.value() == Matrix{{1, 3, 4}, {2, 5, 6}});
    const std::vector<Var> one{b};
    CHECK(ad::concat_cols(one).value() == b.value());
    CHECK_THROWS(ad::concat_cols(std::span<const Var>{}));
    const Matrix g{{0.5, -1.0, 2.0}, {7.0, 0.25, -3.0}};
    t.backward(ad::sum(ad::mul(c, t.constant(g))));
    CHECK(t.grad(a) == Matrix{{0.5}, {7.0}});
    CHECK(t.grad(b) == Matrix{{-1.0, 2.0}, {0.25, -3.0}});
  }

  TEST_CASE("spmm_weighted identity and dense oracle") {
    const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}}, Matrix(3, 1));
    const Adjacency adj = normalize(g);
    Tape t;
    const Matrix h = Matrix::identity(3);
    const Matrix out = ad::spmm_weighted(adj, std::nullopt, t.constant(h)).value();
    const Matrix dense = oracle::dense_normalized(g);
    for (std::size_t j = 0; j < 3; ++j) CHECK(out(1, j) == doctest::Approx(dense(1, j)).epsilon(1e-15));

    Rng rng(2);
    const Matrix x = oracle::random_matrix(3, 5, rng);
    CHECK(ad::spmm_weighted(identity_view(g), std::nullopt, t.constant(x)).value() == x);
    CHECK_THROWS(ad::spmm_weighted(adj, t.constant(Matrix(3, 1, 0.5)), t.constant(x)));
    CHECK_THROWS(ad::spmm_weighted(adj, t.constant(Matrix(4, 1, 1.5)), t.constant(x)));
    CHECK_THROWS(ad::spmm_weighted(adj, std::nullopt, t.constant(Matrix(4, 2))));
  }

  TEST_CASE("spmm_weighted with unit weights equals dense A-hat times H") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Graph g = oracle::random_graph(2 + seed % 15, 0.3, 3, seed);
      Tape t;
      const Matrix ones(g.num_directed_edges(), 1, 1.0);
      const Matrix out = ad::spmm_weighted(normalize(g), t.constant(ones), t.constant(g.features())).value();
      CHECK(max_abs_diff(out, oracle::dense_apply(oracle::dense_normalized(g), g.features())) <= 1e-10);
    }
  }

  TEST_CASE("spmm_weighted gradients flow to weights and features") {
    const Graph g = oracle::random_graph(5, 0.6, 3, 17);
    REQUIRE(g.num_directed_edges() > 0);
    const Adjacency adj = normalize(g);
    Rng rng(5);
    Matrix w0(g.num_directed_edges(), 1);
    for (auto& v : w0.data()) v = 0.1 + 0.8 * rng.uniform();
    const Matrix h0 = g.features();
    const Matrix r = oracle::random_matrix(5, 3, rng);

    Tape t;
    const Var w = t.parameter(w0), h = t.parameter(h0);
    t.backward(ad::sum(ad::mul(ad::spmm_weighted(adj, w, h), t.constant(r))));

    // dense forward: out[v] = Σ_u coeff(u,v)·w(u,v)·h[u] with the dense coefficient matrix
    const Matrix a_hat = oracle::dense_normalized(g);
    const auto slot = [&](std::size_t v, std::size_t u) {
      for (std::size_t e = g.row_ptr()[v]; e < g.row_ptr()[v + 1]; ++e)
        if (g.col_idx()[e] == u) return e;
      return std::size_t(-1);
    };
    auto dense_forward = [&](const Matrix& wv, const Matrix& hv) {
      Matrix m = a_hat;
      for (std::size_t v = 0; v < 5; ++v)
        for (std::size_t u = 0; u < 5; ++u)
          if (u != v && m(v, u) != 0.0) m(v, u) *= wv[slot(v, u)];
      return weighted_sum(oracle::dense_apply(m, hv), r);
    };
    const Matrix nw = oracle::numeric_gradient([&](const Matrix& wv) { return dense_forward(wv, h0); }, w0);
    const Matrix nh = oracle::numeric_gradient([&](const Matrix& hv) { return dense_forward(w0, hv); }, h0);
    CHECK(oracle::max_rel_error(t.grad(w), nw) < 1e-6);
    CHECK(oracle::max_rel_error(t.grad(h), nh) < 1e-6);
  }

  TEST_CASE("pair_dot values and gradient") {
    Tape t;
    const Matrix z{{1, 2}, {3, -1}, {0, 1}};
    const std::vector<std::size_t> l{0, 1, 2}, r{1, 2, 0};
    CHECK(ad::pair_dot(t.constant(z), l, r).value() == Matrix{{1}, {-1}, {2}});
    CHECK(check_unary([&](Var v) { return ad::pair_dot(v, l, r); }, z, 3) < 1e-6);
  }

  TEST_CASE("fan-out accumulates adjoints") {
    Rng rng(8);
    const Matrix x0 = oracle::random_matrix(3, 3, rng);
    Tape t1;
    const Var x1 = t1.parameter(x0);
    t1.backward(ad::sum(ad::add(ad::sigmoid(x1), ad::sigmoid(x1))));
    Tape t2;
    const Var x2 = t2.parameter(x0);
    t2.backward(ad::sum(ad::scale(ad::sigmoid(x2), 2.0)));
    CHECK(max_abs_diff(t1.grad(x1), t2.grad(x2)) <= 1e-15);
  }

  TEST_CASE("backward leaves forward values untouched and is deterministic") {
    const Graph g = oracle::random_graph(8, 0.4, 4, 3);
    const Adjacency adj = normalize(g);
    auto run = [&](Matrix& fwd) {
      Tape t;
      const Var h = t.parameter(g.features());
      const Var out = ad::sigmoid(ad::spmm_weighted(adj, std::nullopt, h));
      const Matrix before = out.value();
      t.backward(ad::sum(out));
      CHECK(out.value() == before);
      fwd = before;
      return t.grad(h);
    };
    Matrix f1, f2;
    const Matrix g1 = run(f1), g2 = run(f2);
    CHECK(g1 == g2);
    CHECK(f1 == f2);
  }

  TEST_CASE("non-finite values are rejected") {
    Tape t;
    const Var big = t.constant(Matrix{{1e308}});
    CHECK_THROWS_AS(ad::scale(big, 10.0), Error);
    try {
      ad::scale(big, 10.0);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNonFinite);
    }
  }

  TEST_CASE("grad_check on simple functions") {
    Rng rng(6);
    const std::vector<Matrix> params{oracle::random_matrix(3, 4, rng), oracle::random_matrix(4, 2, rng)};
    const ScalarFn f = [](Tape&, std::span<const Var> p) { return ad::sum(ad::matmul(p[0], p[1])); };
    const GradCheckResult r = grad_check(f, params);
    CHECK(r.max_rel_error < 1e-6);
    CHECK(r.entries == 20);

    const ScalarFn c = [](Tape& t, std::span<const Var>) { return t.constant(Matrix{{3.0}}); };
    const GradCheckResult rc = grad_check(c, params);
    CHECK(rc.max_rel_error == 0.0);
    CHECK_THROWS(grad_check(f, params, {0.0, false}));
  }
}
