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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Details for each criterion are printed on indented lines
// underneath its verdict.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "oracles.hpp"

using namespace fastgcl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::vector<std::string> notes;
  void note(std::string s) { notes.push_back(std::move(s)); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RunConfig config(std::string_view toml, const std::vector<Override>& ov = {}) {
  return parse_run_config(toml, ov, "<acceptance>");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

Verdict gradient_correctness() {
  Verdict v;
  v.pass = true;
  const auto t0 = Clock::now();
  for (const char* kind : {"gcn", "gin"}) {
    const RunConfig cfg = config(R"(
[dataset]
block_sizes = [3, 3]
p_in = 1.0
p_out = 0.3
feature_dim = 4
[encoder]
num_layers = 2
hidden_dim = 8
[train]
lambda = 0.5
)",
                                 {{"encoder.kind", kind}});
    const GradCheckResult r = cmd_gradcheck(cfg, false);
    v.note(fmt::format("{} K=2: max rel error {:.3e} over {} entries", kind, r.max_rel_error, r.entries));
    v.pass = v.pass && r.max_rel_error < kGradCheckThreshold;
  }
  const double secs = seconds_since(t0);
  v.note(fmt::format("runtime {:.2f} s", secs));
  v.pass = v.pass && secs < 10.0;
  return v;
}

Verdict mlp_degeneration() {
  Verdict v;
  v.pass = true;
  std::size_t compared = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = oracle::random_graph(12, 0.3, 5, 1000 + seed);
    for (auto kind : {EncoderKind::kGcn, EncoderKind::kGin}) {
      EncoderConfig cfg;
      cfg.kind = kind;
      cfg.input_dim = 5;
      cfg.hidden_dim = 7;
      cfg.num_layers = 2;
      const ParamSet p = init_model_params(cfg, seed);
      ad::Tape t;
      const BoundParams bound(t, p, false);
      const Matrix got = encode(cfg, bound, identity_view(g), std::nullopt, t.constant(g.features())).back().value();
      const bool same = got == oracle::mlp_reference(cfg, p, g.features());
      v.pass = v.pass && same;
      ++compared;
      if (!same) v.note(fmt::format("seed {} {}: mismatch", seed, to_string(kind)));
    }
  }
  v.note(fmt::format("{} encoder/seed pairs compared with exact equality", compared));
  return v;
}

Verdict unit_weight_identity() {
  Verdict v;
  v.pass = true;
  double worst_cos = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SbmSpec spec;
    spec.block_sizes = {15, 15};
    spec.seed = seed;
    spec.feature_dim = 8;
    const Graph g = generate_sbm(spec);
    const PreparedGraph prep(g);
    for (auto kind : {EncoderKind::kGcn, EncoderKind::kGin}) {
      EncoderConfig cfg;
      cfg.kind = kind;
      cfg.input_dim = 8;
      const ParamSet p = init_model_params(cfg, seed);
      ad::Tape t;
      const BoundParams bound(t, p, false);
      const ViewBundle views = build_views(cfg, bound, prep, t.constant(g.features()), EdgeWeightMode::kUnit);
      for (std::size_t k = 0; k < cfg.num_layers; ++k)
        v.pass = v.pass && views.positive[k].value() == views.anchor[k].value();
      for (double c : ad::row_cosine(views.h_alpha(), views.h_rho()).value().data())
        worst_cos = std::max(worst_cos, std::abs(c - 1.0));
    }
  }
  v.note(fmt::format("H^rho == H^alpha bitwise for GCN and GIN on 5 graphs; max |cos - 1| = {:.1e}", worst_cos));
  v.pass = v.pass && worst_cos == 0.0;
  return v;
}

Verdict regularizer_direction() {
  Verdict v;
  v.pass = true;
  const double lambda = 0.5;
  const Graph g = oracle::random_graph(10, 0.4, 2, 77);
  const std::size_t m2 = g.num_directed_edges();
  Rng rng(5);
  Matrix e(m2, 1);
  for (auto& x : e.data()) x = rng.uniform(0.05, 0.95);
  auto loss = [&](const Matrix& w) {
    ad::Tape t;
    return lambda * norm_loss(t.constant(w)).value()[0];
  };
  ad::Tape t;
  const ad::Var w = t.parameter(e);
  t.backward(ad::scale(norm_loss(w), lambda));
  const Matrix fd = oracle::numeric_gradient(loss, e);
  double worst = 0.0;
  std::size_t positive = 0;
  for (std::size_t i = 0; i < m2; ++i) {
    positive += fd[i] > 0.0;
    const double closed = lambda / (1.0 + std::exp(-(1.0 - e[i]))) / static_cast<double>(m2);
    worst = std::max(worst, std::abs(t.grad(w)[i] - closed) / closed);
  }
  Matrix stepped = e;
  std::size_t lowered = 0;
  for (std::size_t i = 0; i < m2; ++i) {
    stepped[i] -= 0.1 * t.grad(w)[i];
    lowered += stepped[i] < e[i];
  }
  v.note(fmt::format("{} directed edges; finite-difference derivative > 0 on {}", m2, positive));
  v.note(fmt::format("one descent step lowers {} of {} edge weights", lowered, m2));
  v.note(fmt::format("analytic vs lambda*sigmoid(1-e)/(2M): max rel diff {:.1e}", worst));
  v.pass = positive == m2 && lowered == m2 && worst < 1e-12 && loss(stepped) < loss(e);
  return v;
}

Verdict convergence() {
  Verdict v;
  v.pass = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RunConfig cfg = config(R"(
[dataset]
block_sizes = [30, 30]
p_in = 0.3
p_out = 0.02
feature_dim = 16
feature_signal = 2.0
[train]
epochs = 100
)",
                                 {{"seed", std::to_string(seed)}});
    const LoadedData data = load_data(cfg);
    const TrainResult r = run_training(cfg, data);
    const auto& ep = r.report.epochs;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      first += ep[i].loss / 10.0;
      last += ep[ep.size() - 10 + i].loss / 10.0;
    }
    const bool ok = ep.back().loss < ep.front().loss && last < first;
    v.pass = v.pass && ok;
    v.note(fmt::format("seed {}: epoch-1 {:.4f} -> epoch-100 {:.4f}; first-10 avg {:.4f}, last-10 avg {:.4f}", seed,
                       ep.front().loss, ep.back().loss, first, last));
  }
  return v;
}

// Shared node benchmark for criteria 6 and 7.
struct NodeBench {
  std::string toml;
  double signal = 0.0;
  std::string lr;
  std::string epochs;
  bool ready = false;
};

const char* kNodeBase = R"(
[dataset]
block_sizes = [50, 50, 50, 50]
p_in = 0.1
p_out = 0.01
feature_dim = 32
[eval]
num_repeats = 20
)";

EvalReport node_eval(const RunConfig& cfg, std::optional<BaselineKind> baseline = std::nullopt) {
  const LoadedData data = load_data(cfg);
  if (baseline) return run_evaluation(cfg, data, nullptr, baseline);
  const TrainResult r = run_training(cfg, data);
  return run_evaluation(cfg, data, &r.params, std::nullopt);
}

double best_val(const EvalReport& r) { return *std::max_element(r.grid_val_mean.begin(), r.grid_val_mean.end()); }

Verdict downstream_utility(NodeBench& bench) {
  Verdict v;
  const auto t0 = Clock::now();

  // Pick the feature signal whose raw-feature accuracy is closest to 65%.
  double best_gap = 1e9;
  EvalReport raw;
  for (double s : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    const RunConfig cfg = config(kNodeBase, {{"dataset.feature_signal", fmt::format("{}", s)}});
    const EvalReport r = node_eval(cfg, BaselineKind::kRawFeature);
    v.note(fmt::format("feature_signal {:.1f}: raw-feature accuracy {:.2f}%", s, 100.0 * r.mean));
    if (std::abs(r.mean - 0.65) < best_gap) {
      best_gap = std::abs(r.mean - 0.65);
      bench.signal = s;
      raw = r;
    }
  }
  const std::vector<Override> data_ov{{"dataset.feature_signal", fmt::format("{}", bench.signal)}};
  const EvalReport riu = node_eval(config(kNodeBase, data_ov), BaselineKind::kRiu);

  // Training budget chosen by mean validation accuracy of the selected probe;
  // test accuracy plays no part in the choice.
  double top_val = -1.0;
  EvalReport chosen;
  for (const char* lr : {"1e-4", "3e-4", "1e-3"})
    for (const char* epochs : {"10", "30", "100"}) {
      auto ov = data_ov;
      ov.emplace_back("train.lr", lr);
      ov.emplace_back("train.epochs", epochs);
      const EvalReport r = node_eval(config(kNodeBase, ov));
      v.note(fmt::format("budget lr={} epochs={}: val {:.2f}%, test {:.2f}%", lr, epochs, 100.0 * best_val(r),
                         100.0 * r.mean));
      if (best_val(r) > top_val) {
        top_val = best_val(r);
        bench.lr = lr;
        bench.epochs = epochs;
        chosen = r;
      }
    }
  bench.ready = true;
  const double secs = seconds_since(t0);
  const double fg = 100.0 * chosen.mean, ri = 100.0 * riu.mean, rw = 100.0 * raw.mean;
  v.note(fmt::format("chosen signal {:.1f}, budget lr={} epochs={}", bench.signal, bench.lr, bench.epochs));
  v.note(fmt::format("FastGCL {:.2f} +- {:.2f}  R.I.U. {:.2f} +- {:.2f}  raw {:.2f} +- {:.2f}", fg,
                     100.0 * chosen.std, ri, 100.0 * riu.std, rw, 100.0 * raw.std));
  v.note(fmt::format("runtime {:.1f} s", secs));
  v.pass = rw >= 55.0 && rw <= 75.0 && fg >= ri - 1.0 && fg >= rw + 5.0 && secs < 300.0;
  return v;
}

Verdict ablation_ordering(const NodeBench& bench) {
  Verdict v;
  if (!bench.ready) {
    v.note("criterion-6 benchmark unavailable");
    return v;
  }
  double learned = 0.0, random = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    std::vector<Override> ov{{"dataset.feature_signal", fmt::format("{}", bench.signal)},
                             {"train.lr", bench.lr},
                             {"train.epochs", bench.epochs},
                             {"seed", std::to_string(seed)},
                             {"dataset.seed", "0"}};
    const double a = node_eval(config(kNodeBase, ov)).mean;
    ov.emplace_back("train.ablation", "random");
    const double b = node_eval(config(kNodeBase, ov)).mean;
    learned += 10.0 * a;
    random += 10.0 * b;
  }
  v.note(fmt::format("learned weighting {:.2f}%, random weighting {:.2f}% (10 seeds)", learned, random));
  v.pass = learned >= random - 0.5;
  return v;
}

Verdict graph_pipeline() {
  Verdict v;
  const char* base = R"(
task = "graph"
[dataset]
kind = "motifs"
num_graphs = 100
[encoder]
kind = "gin"
num_layers = 2
hidden_dim = 32
[train]
epochs = 50
lr = 1e-3
)";
  const RunConfig cfg = config(base);
  const LoadedData data = load_data(cfg);
  const TrainResult r = run_training(cfg, data);
  const EvalReport trained = run_evaluation(cfg, data, &r.params, std::nullopt);
  const EvalReport riu = run_evaluation(cfg, data, nullptr, BaselineKind::kRiu);
  const EvalReport raw = run_evaluation(cfg, data, nullptr, BaselineKind::kRawFeature);
  v.note(fmt::format("trained GIN {:.1f}%, untrained GIN {:.1f}%, raw {:.1f}% ({}-fold CV)", 100.0 * trained.mean,
                     100.0 * riu.mean, 100.0 * raw.mean, trained.per_run.size()));
  v.pass = trained.mean > 0.70 && trained.mean > riu.mean;
  return v;
}

Verdict determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "fastgcl_acceptance";
  fs::remove_all(root);
  const char* toml = R"(
seed = 42
[dataset]
block_sizes = [25, 25]
feature_dim = 8
[train]
epochs = 20
[eval]
num_repeats = 10
)";
  for (const char* name : {"a", "b"}) {
    const RunConfig cfg = config(toml, {{"output_dir", (root / name).string()}});
    cmd_train(cfg);
    cmd_eval(cfg, "", "");
  }
  const bool curve = slurp(root / "a" / "curve.csv") == slurp(root / "b" / "curve.csv");
  const bool eval = slurp(root / "a" / "eval.json") == slurp(root / "b" / "eval.json");
  const nlohmann::json j = nlohmann::json::parse(slurp(root / "a" / "eval.json"));
  const std::vector<double> runs = j["per_run"].get<std::vector<double>>();
  double m = 0.0;
  for (double x : runs) m += x / static_cast<double>(runs.size());
  double ss = 0.0;
  for (double x : runs) ss += (x - m) * (x - m);
  const double recomputed = std::sqrt(ss / static_cast<double>(runs.size() - 1));
  const double diff = std::abs(recomputed - j["std"].get<double>());
  v.note(fmt::format("curve.csv identical: {}, eval.json identical: {}", curve, eval));
  v.note(fmt::format("std recomputed from {} runs differs by {:.1e}", runs.size(), diff));
  v.pass = curve && eval && diff <= 1e-9;
  fs::remove_all(root);
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.below(16);
    const Graph g = oracle::random_graph(n, rng.uniform(0.0, 0.8), 3, seed + 500);
    Matrix w(g.num_directed_edges(), 1);
    const auto mirror = g.mirror_entries();
    const auto rows = g.entry_rows();
    for (std::size_t e = 0; e < w.rows(); ++e)
      if (rows[e] < g.col_idx()[e]) w[e] = w[mirror[e]] = rng.uniform_open();

    // Dense Â ⊙ E with the self-loop entries left at weight 1.
    Matrix dense = oracle::dense_normalized(g);
    for (std::size_t e = 0; e < w.rows(); ++e) dense(rows[e], g.col_idx()[e]) *= w[e];

    ad::Tape t;
    const Matrix got =
        ad::spmm_weighted(normalize(g), t.constant(w), t.constant(g.features())).value();
    worst = std::max(worst, max_abs_diff(got, oracle::naive_matmul(dense, g.features())));
  }
  v.note(fmt::format("50 random graphs with N <= 16: max abs diff {:.1e}", worst));
  v.pass = worst <= 1e-10;
  return v;
}

}  // namespace

int main() {
  set_log_sink([](LogLevel level, const std::string& msg) {
    if (level != LogLevel::kInfo) std::fprintf(stderr, "%s\n", msg.c_str());
  });

  NodeBench bench;
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gradient correctness", gradient_correctness},
      {"MLP degeneration over the self-loop-only view", mlp_degeneration},
      {"unit-weight identity", unit_weight_identity},
      {"regularizer pushes edge weights down", regularizer_direction},
      {"convergence on the 2-block SBM", convergence},
      {"downstream utility on the 4-block SBM", [&] { return downstream_utility(bench); }},
      {"learned vs random weighting", [&] { return ablation_ordering(bench); }},
      {"graph-level pipeline on motif graphs", graph_pipeline},
      {"determinism and reporting", determinism},
      {"sparse aggregation vs dense oracle", oracle_equivalence},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note(std::string("exception: ") + e.what());
    }
    failed += !v.pass;
    std::printf("[%s] %zu. %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str());
    for (const auto& n : v.notes) std::printf("       %s\n", n.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
