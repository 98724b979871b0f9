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
#include <filesystem>
#include <fstream>
#include <numeric>

#include "encoder.hpp"
#include "oracles.hpp"

using namespace fastgcl;
namespace fs = std::filesystem;

namespace {

Matrix forward(const EncoderConfig& cfg, const ParamSet& p, const Adjacency& adj, const Matrix& x) {
  ad::Tape t;
  const BoundParams bound(t, p, false);
  return encode(cfg, bound, adj, std::nullopt, t.constant(x)).back().value();
}

EncoderConfig make_cfg(EncoderKind kind, Activation act, std::size_t in, std::size_t hidden, std::size_t layers) {
  EncoderConfig c;
  c.kind = kind;
  c.activation = act;
  c.input_dim = in;
  c.hidden_dim = hidden;
  c.num_layers = layers;
  return c;
}

// Randomizes every tensor, including biases, slopes and GIN eps, so the
// comparison exercises all of them.
void perturb(ParamSet& p, Rng& rng) {
  for (auto& t : p.tensors())
    for (auto& v : t.value.data()) v = t.name.ends_with("slope") ? rng.uniform(0.05, 0.5) : rng.normal() * 0.5;
}

}  // namespace

TEST_SUITE("encoders") {
  TEST_CASE("self-loop-only graph reduces every encoder to a per-row MLP") {
    const EncoderKind kinds[] = {EncoderKind::kGcn, EncoderKind::kGin};
    const Activation acts[] = {Activation::kPrelu, Activation::kRelu, Activation::kIdentity};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Graph g = oracle::random_graph(7, 0.4, 5, seed);
      for (auto kind : kinds)
        for (auto act : acts) {
          const EncoderConfig cfg = make_cfg(kind, act, 5, 6, 1 + seed % 3);
          ParamSet p = init_encoder_params(cfg, seed);
          Rng rng(seed + 50);
          perturb(p, rng);
          const Matrix got = forward(cfg, p, identity_view(g), g.features());
          CHECK(got == oracle::mlp_reference(cfg, p, g.features()));
        }
    }
  }

  TEST_CASE("GIN with a fixed eps matches the MLP reference") {
    EncoderConfig cfg = make_cfg(EncoderKind::kGin, Activation::kRelu, 3, 4, 2);
    cfg.gin_train_eps = false;
    cfg.gin_eps = 0.3;
    const ParamSet p = init_encoder_params(cfg, 4);
    CHECK_FALSE(p.contains(encoder_param_name(0, "eps")));
    const Graph g = oracle::random_graph(5, 0.5, 3, 9);
    CHECK(forward(cfg, p, identity_view(g), g.features()) == oracle::mlp_reference(cfg, p, g.features()));
  }

  TEST_CASE("one GCN layer with identity weight returns the normalized adjacency") {
    const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}}, Matrix::identity(3));
    EncoderConfig cfg = make_cfg(EncoderKind::kGcn, Activation::kIdentity, 3, 3, 1);
    ParamSet p = init_encoder_params(cfg, 0);
    p.at(encoder_param_name(0, "weight")) = Matrix::identity(3);
    const Matrix out = forward(cfg, p, normalize(g), g.features());
    CHECK(max_abs_diff(out, oracle::dense_normalized(g)) <= 1e-15);
    CHECK(out(1, 0) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-12));
  }

  TEST_CASE("GIN sums neighbors on a real graph") {
    // Path 0-1-2, scalar features, identity MLPs: out = (1+eps)·h + Σ neighbors.
    const Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}}, Matrix{{1.0}, {10.0}, {100.0}});
    EncoderConfig cfg = make_cfg(EncoderKind::kGin, Activation::kIdentity, 1, 1, 1);
    cfg.mlp_hidden = 1;
    cfg.gin_eps = 0.5;
    ParamSet p = init_encoder_params(cfg, 0);
    p.at(encoder_param_name(0, "mlp0.weight")) = Matrix{{1.0}};
    p.at(encoder_param_name(0, "mlp1.weight")) = Matrix{{1.0}};
    const Matrix out = forward(cfg, p, normalize(g), g.features());
    CHECK(out == Matrix{{1.5 + 10.0}, {15.0 + 101.0}, {150.0 + 10.0}});
  }

  TEST_CASE("GIN on an isolated node depends only on its own features") {
    const Graph g = Graph::from_edges(3, {{0, 1}}, Matrix{{1.0, -2.0}, {0.5, 4.0}, {3.0, 1.0}});
    const EncoderConfig cfg = make_cfg(EncoderKind::kGin, Activation::kPrelu, 2, 4, 2);
    ParamSet p = init_encoder_params(cfg, 1);
    Rng rng(1);
    perturb(p, rng);
    const Matrix full = forward(cfg, p, normalize(g), g.features());
    const Matrix alone = oracle::mlp_reference(cfg, p, Matrix{{3.0, 1.0}});
    for (std::size_t j = 0; j < 4; ++j) CHECK(full(2, j) == alone(0, j));
  }

  TEST_CASE("readout sums each layer per graph and concatenates") {
    ad::Tape t;
    const ad::Var h1 = t.constant(Matrix{{1, 2}, {3, 4}, {5, 6}});
    const ad::Var h2 = t.constant(Matrix{{1}, {1}, {1}});
    const std::vector<ad::Var> states{h1, h2};
    const std::vector<std::size_t> ids{0, 0, 1};
    CHECK(readout(states, ids, 2).value() == Matrix{{4, 6, 2}, {5, 6, 1}});
    const std::vector<std::size_t> one{0, 0, 0};
    CHECK(readout(states, one, 1).value() == Matrix{{9, 12, 3}});
    CHECK_THROWS(readout(std::span<const ad::Var>{}, ids, 2));
  }

  TEST_CASE("initialization is deterministic and within the Glorot bound") {
    const EncoderConfig cfg = make_cfg(EncoderKind::kGcn, Activation::kPrelu, 12, 20, 2);
    const ParamSet a = init_encoder_params(cfg, 42), b = init_encoder_params(cfg, 42);
    const ParamSet c = init_encoder_params(cfg, 43);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    const double bound0 = std::sqrt(6.0 / (12 + 20));
    for (double w : a.at(encoder_param_name(0, "weight")).data()) CHECK(std::abs(w) <= bound0);
    for (double w : a.at(encoder_param_name(0, "bias")).data()) CHECK(w == 0.0);
    CHECK(a.at(encoder_param_name(1, "slope"))[0] == 0.25);

    Rng rng(3);
    const Matrix w = glorot_uniform(50, 70, rng);
    const double bound = std::sqrt(6.0 / 120.0);
    double sumsq = 0.0;
    for (double v : w.data()) {
      CHECK(std::abs(v) <= bound);
      sumsq += v * v;
    }
    // Uniform(-b, b) has variance b²/3.
    CHECK(sumsq / w.size() == doctest::Approx(bound * bound / 3.0).epsilon(0.05));
  }

  TEST_CASE("parameter layouts") {
    EncoderConfig gin = make_cfg(EncoderKind::kGin, Activation::kRelu, 3, 8, 3);
    gin.mlp_hidden = 5;
    const ParamSet p = init_encoder_params(gin, 0);
    CHECK(p.size() == 3 * 5);
    CHECK(p.at("encoder.0.mlp0.weight").rows() == 3);
    CHECK(p.at("encoder.0.mlp0.weight").cols() == 5);
    CHECK(p.at("encoder.2.mlp1.weight").cols() == 8);
    CHECK_NOTHROW(check_encoder_params(gin, p));
    gin.hidden_dim = 9;
    CHECK_THROWS_AS(check_encoder_params(gin, p), Error);
    EncoderConfig bad = gin;
    bad.num_layers = 0;
    CHECK_THROWS(init_encoder_params(bad, 0));
    CHECK_THROWS(parse_encoder_kind("gat"));
    CHECK(parse_activation("relu") == Activation::kRelu);
  }

  TEST_CASE("encoders are permutation equivariant") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Graph g = oracle::random_graph(9, 0.35, 4, seed + 10);
      std::vector<std::size_t> perm(9);
      std::iota(perm.begin(), perm.end(), 0);
      Rng rng(seed);
      rng.shuffle(perm.begin(), perm.end());
      EdgeList edges;
      for (std::size_t v = 0; v < 9; ++v)
        for (auto u : g.neighbors(v))
          if (v < u) edges.emplace_back(perm[v], perm[u]);
      Matrix xp(9, 4);
      for (std::size_t v = 0; v < 9; ++v)
        for (std::size_t j = 0; j < 4; ++j) xp(perm[v], j) = g.features()(v, j);
      const Graph gp = Graph::from_edges(9, edges, xp);
      for (auto kind : {EncoderKind::kGcn, EncoderKind::kGin}) {
        const EncoderConfig cfg = make_cfg(kind, Activation::kPrelu, 4, 6, 2);
        const ParamSet p = init_encoder_params(cfg, seed);
        const Matrix a = forward(cfg, p, normalize(g), g.features());
        const Matrix b = forward(cfg, p, normalize(gp), gp.features());
        double worst = 0.0;
        for (std::size_t v = 0; v < 9; ++v)
          for (std::size_t j = 0; j < 6; ++j) worst = std::max(worst, std::abs(a(v, j) - b(perm[v], j)));
        CHECK(worst <= 1e-12);
      }
    }
  }

  TEST_CASE("checkpoint round trip is bit exact") {
    const fs::path dir = fs::temp_directory_path() / "fastgcl_encoder_ckpt";
    fs::create_directories(dir);
    const EncoderConfig cfg = make_cfg(EncoderKind::kGin, Activation::kPrelu, 3, 4, 2);
    ParamSet p = init_encoder_params(cfg, 7);
    p.at("encoder.0.mlp0.bias")[0] = 1.0 / 3.0;
    p.at("encoder.1.slope")[0] = -0.0;
    save_checkpoint(p, dir / "p.ckpt");
    const ParamSet q = load_checkpoint(dir / "p.ckpt");
    CHECK(q == p);
    CHECK(std::signbit(q.at("encoder.1.slope")[0]));

    {
      std::ofstream out(dir / "bad.ckpt");
      out << "not a checkpoint";
    }
    try {
      load_checkpoint(dir / "bad.ckpt");
      FAIL("expected a checkpoint error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kCheckpoint);
    }
    CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), Error);
    fs::remove_all(dir);
  }
}
