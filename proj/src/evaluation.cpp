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

#include "evaluation.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "objective.hpp"

namespace fastgcl {

namespace {

std::size_t num_classes(std::span<const int> labels) {
  int hi = -1;
  for (int l : labels) {
    require(l >= 0, "class labels must be non-negative");
    hi = std::max(hi, l);
  }
  return static_cast<std::size_t>(hi + 1);
}

// Largest eigenvalue of AᵀA/n for A = [X | 1] by power iteration.
double curvature_bound(const Matrix& xs, std::size_t n) {
  const std::size_t f = xs.cols();
  std::vector<double> v(f + 1, 1.0), av(n), next(f + 1);
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 1.0;
    for (auto& x : v) x /= norm;
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[f];
      for (std::size_t j = 0; j < f; ++j) s += xs(i, j) * v[j];
      av[i] = s;
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < f; ++j) next[j] += xs(i, j) * av[i];
      next[f] += av[i];
    }
    lambda = 0.0;
    for (std::size_t j = 0; j <= f; ++j) {
      next[j] /= static_cast<double>(n);
      lambda += next[j] * v[j];
    }
    v.swap(next);
  }
  return std::max(lambda, 1e-12);
}

double mean_of(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

EvalReport finish_report(std::vector<double> per_run, const ProbeConfig& selected, std::vector<double> grid_val,
                         std::string protocol) {
  EvalReport r;
  r.per_run = std::move(per_run);
  r.mean = mean_of(r.per_run);
  r.std = sample_std(r.per_run);
  r.selected = selected;
  r.grid_val_mean = std::move(grid_val);
  r.protocol = std::move(protocol);
  return r;
}

std::size_t argmax_first(std::span<const double> xs) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] > xs[best]) best = i;
  return best;
}

}  // namespace

void SplitSpec::validate() const {
  require(train_frac > 0 && val_frac > 0 && test_frac > 0, "split fractions must be positive");
  require(std::abs(train_frac + val_frac + test_frac - 1.0) <= 1e-9, "split fractions must sum to 1");
  require(num_repeats >= 1, "num_repeats must be >= 1");
}

void ProbeConfig::validate() const {
  require(l2_strength >= 0.0, "l2_strength must be >= 0");
  require(max_iters >= 1, "max_iters must be >= 1");
  require(lr > 0.0, "probe lr must be > 0");
}

std::vector<ProbeConfig> default_probe_grid() {
  std::vector<ProbeConfig> grid;
  for (double l2 : {1e-4, 1e-3, 1e-2, 1e-1}) {
    ProbeConfig c;
    c.l2_strength = l2;
    grid.push_back(c);
  }
  return grid;
}

std::vector<Split> make_splits(std::span<const int> labels, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = labels.size();
  const auto n_train = static_cast<std::size_t>(std::llround(spec.train_frac * static_cast<double>(n)));
  const auto n_val = static_cast<std::size_t>(std::llround(spec.val_frac * static_cast<double>(n)));
  require(n_train >= 1 && n_val >= 1 && n_train + n_val < n,
          fmt::format("split of {} items into {:.3}/{:.3}/{:.3} leaves an empty part", n, spec.train_frac,
                      spec.val_frac, spec.test_frac));
  const std::size_t classes = num_classes(labels);
  std::vector<Split> splits;
  for (std::size_t r = 0; r < spec.num_repeats; ++r) {
    Rng rng(mix_seed(spec.seed, r));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm.begin(), perm.end());

    // Pull a member of any class missing from train into the train part,
    // evicting a member of a class that appears more than once there.
    std::vector<std::size_t> count(classes, 0);
    for (std::size_t i = 0; i < n_train; ++i) ++count[static_cast<std::size_t>(labels[perm[i]])];
    for (std::size_t c = 0; c < classes; ++c) {
      if (count[c] > 0) continue;
      std::size_t donor = n;
      for (std::size_t i = n_train; i < n && donor == n; ++i)
        if (static_cast<std::size_t>(labels[perm[i]]) == c) donor = i;
      if (donor == n) continue;  // class absent from the data
      std::size_t evict = n_train;
      for (std::size_t i = 0; i < n_train && evict == n_train; ++i)
        if (count[static_cast<std::size_t>(labels[perm[i]])] > 1) evict = i;
      if (evict == n_train) break;  // infeasible: more classes than train slots
      --count[static_cast<std::size_t>(labels[perm[evict]])];
      ++count[c];
      std::swap(perm[evict], perm[donor]);
    }

    Split s;
    s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                 perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
    splits.push_back(std::move(s));
  }
  return splits;
}

std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t folds,
                                                       std::uint64_t seed) {
  require(folds >= 2, "need at least two folds");
  require(labels.size() >= folds, fmt::format("{} items cannot fill {} folds", labels.size(), folds));
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> out(folds);
  std::size_t next = 0;
  for (auto& [label, members] : by_class) {
    rng.shuffle(members.begin(), members.end());
    for (auto m : members) {
      out[next].push_back(m);
      next = (next + 1) % folds;
    }
  }
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

std::vector<int> Probe::predict(const Matrix& x, std::span<const std::size_t> rows) const {
  std::vector<int> out;
  out.reserve(rows.size());
  const std::size_t f = weight.rows();
  const std::size_t c = weight.cols();
  std::vector<double> z(c);
  for (auto r : rows) {
    for (std::size_t k = 0; k < c; ++k) z[k] = bias(0, k);
    for (std::size_t j = 0; j < f; ++j) {
      const double xj = (x(r, j) - center[j]) * inv_scale[j];
      for (std::size_t k = 0; k < c; ++k) z[k] += xj * weight(j, k);
    }
    out.push_back(static_cast<int>(argmax_first(z)));
  }
  return out;
}

double Probe::accuracy(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows) const {
  if (rows.empty()) return 0.0;
  const auto pred = predict(x, rows);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) hit += pred[i] == labels[rows[i]];
  return static_cast<double>(hit) / static_cast<double>(rows.size());
}

Probe fit_probe(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> train_idx,
                const ProbeConfig& cfg) {
  cfg.validate();
  require(!train_idx.empty(), "fit_probe: empty training set");
  require(labels.size() == x.rows(), "fit_probe: one label per embedding row required");
  if (!x.all_finite()) fail(ErrorCode::kNonFinite, "fit_probe: embeddings contain non-finite values");
  const std::size_t classes = num_classes(labels);
  {
    const int first = labels[train_idx.front()];
    bool multi = false;
    for (auto i : train_idx) multi = multi || labels[i] != first;
    require(multi, "fit_probe: training set contains a single class");
  }
  const std::size_t n = train_idx.size();
  const std::size_t f = x.cols();

  Probe p;
  p.center.assign(f, 0.0);
  p.inv_scale.assign(f, 1.0);
  for (auto i : train_idx)
    for (std::size_t j = 0; j < f; ++j) p.center[j] += x(i, j);
  for (auto& c : p.center) c /= static_cast<double>(n);
  for (std::size_t j = 0; j < f; ++j) {
    double var = 0.0;
    for (auto i : train_idx) var += (x(i, j) - p.center[j]) * (x(i, j) - p.center[j]);
    const double sd = std::sqrt(var / static_cast<double>(n));
    p.inv_scale[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  Matrix xs(n, f);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < f; ++j) xs(r, j) = (x(train_idx[r], j) - p.center[j]) * p.inv_scale[j];

  const double step = cfg.lr / (0.5 * curvature_bound(xs, n) + cfg.l2_strength);
  p.weight = Matrix(f, classes);
  p.bias = Matrix(1, classes);
  Matrix gw(f, classes), gb(1, classes), logits(n, classes);
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    logits = matmul(xs, p.weight);
    for (std::size_t r = 0; r < n; ++r) {
      auto z = logits.row(r);
      double hi = z[0] + p.bias(0, 0);
      for (std::size_t k = 0; k < classes; ++k) hi = std::max(hi, z[k] + p.bias(0, k));
      double total = 0.0;
      for (std::size_t k = 0; k < classes; ++k) {
        z[k] = std::exp(z[k] + p.bias(0, k) - hi);
        total += z[k];
      }
      for (std::size_t k = 0; k < classes; ++k) {
        z[k] /= total;
        if (static_cast<std::size_t>(labels[train_idx[r]]) == k) z[k] -= 1.0;
        z[k] /= static_cast<double>(n);
      }
    }
    gw = matmul_at_b(xs, logits);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < gw.size(); ++i) {
      gw[i] += cfg.l2_strength * p.weight[i];
      norm2 += gw[i] * gw[i];
    }
    for (std::size_t k = 0; k < classes; ++k) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += logits(r, k);
      gb(0, k) = s;
      norm2 += s * s;
    }
    p.grad_norm = std::sqrt(norm2);
    p.iterations = it;
    if (p.grad_norm < cfg.tol) break;
    for (std::size_t i = 0; i < gw.size(); ++i) p.weight[i] -= step * gw[i];
    for (std::size_t k = 0; k < classes; ++k) p.bias(0, k) -= step * gb(0, k);
    p.iterations = it + 1;
  }
  return p;
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

EvalReport evaluate_node(const Matrix& embeddings, std::span<const int> labels, const SplitSpec& split,
                         std::span<const ProbeConfig> grid) {
  require(!grid.empty(), "evaluate_node: empty probe grid");
  require(embeddings.rows() == labels.size(), "evaluate_node: one label per embedding row required");
  const auto splits = make_splits(labels, split);

  // Fit everything and score on validation only; test rows are not touched
  // until a configuration has been chosen.
  std::vector<std::vector<Probe>> probes(grid.size());
  std::vector<double> val_mean(grid.size(), 0.0);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (const auto& s : splits) {
      probes[c].push_back(fit_probe(embeddings, labels, s.train, grid[c]));
      val_mean[c] += probes[c].back().accuracy(embeddings, labels, s.val);
    }
    val_mean[c] /= static_cast<double>(splits.size());
  }
  const std::size_t best = argmax_first(val_mean);

  std::vector<double> test;
  for (std::size_t r = 0; r < splits.size(); ++r)
    test.push_back(probes[best][r].accuracy(embeddings, labels, splits[r].test));
  return finish_report(std::move(test), grid[best], std::move(val_mean), "random_split");
}

EvalReport evaluate_graph_cv(const Matrix& embeddings, std::span<const int> labels, std::size_t folds,
                             std::uint64_t seed, std::span<const ProbeConfig> grid) {
  require(!grid.empty(), "evaluate_graph_cv: empty probe grid");
  require(embeddings.rows() == labels.size(), "evaluate_graph_cv: one label per embedding row required");
  if (labels.size() < folds)
    fail(ErrorCode::kPrecondition, fmt::format("{} graphs are fewer than {} folds", labels.size(), folds));
  const auto fold_sets = stratified_folds(labels, folds, seed);

  struct Part {
    std::vector<std::size_t> train, val, test;
  };
  std::vector<Part> parts(folds);
  for (std::size_t k = 0; k < folds; ++k) {
    const std::size_t v = (k + 1) % folds;
    parts[k].test = fold_sets[k];
    parts[k].val = fold_sets[v];
    for (std::size_t j = 0; j < folds; ++j)
      if (j != k && j != v) parts[k].train.insert(parts[k].train.end(), fold_sets[j].begin(), fold_sets[j].end());
  }

  std::vector<std::vector<Probe>> probes(grid.size());
  std::vector<double> val_mean(grid.size(), 0.0);
  for (std::size_t c = 0; c < grid.size(); ++c) {
    for (const auto& part : parts) {
      probes[c].push_back(fit_probe(embeddings, labels, part.train, grid[c]));
      val_mean[c] += probes[c].back().accuracy(embeddings, labels, part.val);
    }
    val_mean[c] /= static_cast<double>(folds);
  }
  const std::size_t best = argmax_first(val_mean);
  std::vector<double> test;
  for (std::size_t k = 0; k < folds; ++k) test.push_back(probes[best][k].accuracy(embeddings, labels, parts[k].test));
  return finish_report(std::move(test), grid[best], std::move(val_mean), "stratified_cv");
}

Matrix node_embeddings(const EncoderConfig& cfg, const ParamSet& params, const Graph& g) {
  ad::Tape tape;
  const BoundParams bound(tape, params, false);
  const Adjacency adj = normalize(g);
  const auto states = encode(cfg, bound, adj, std::nullopt, tape.constant(g.features()));
  return states.back().value();
}

Matrix graph_embeddings(const EncoderConfig& cfg, const ParamSet& params, const GraphDataset& data) {
  require(data.size() > 0, "graph_embeddings: empty dataset");
  const Graph batch = batch_graphs(data.graphs);
  ad::Tape tape;
  const BoundParams bound(tape, params, false);
  const Adjacency adj = normalize(batch);
  const auto states = encode(cfg, bound, adj, std::nullopt, tape.constant(batch.features()));
  return readout(states, batch.graph_ids(), data.size()).value();
}

BaselineKind parse_baseline(std::string_view s) {
  if (s == "raw_feature" || s == "raw") return BaselineKind::kRawFeature;
  if (s == "riu" || s == "riu_encoder") return BaselineKind::kRiu;
  fail(ErrorCode::kConfig, "unknown baseline '" + std::string(s) + "'");
}

Matrix baseline_embeddings(BaselineKind kind, const Graph& g, const EncoderConfig& cfg, std::uint64_t seed) {
  if (kind == BaselineKind::kRawFeature) return g.features();
  return node_embeddings(cfg, init_model_params(cfg, seed), g);
}

Matrix baseline_embeddings(BaselineKind kind, const GraphDataset& data, const EncoderConfig& cfg,
                           std::uint64_t seed) {
  if (kind == BaselineKind::kRiu) return graph_embeddings(cfg, init_model_params(cfg, seed), data);
  Matrix out(data.size(), data.graphs.front().feature_dim());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.graphs[i].features();
    for (std::size_t v = 0; v < x.rows(); ++v)
      for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += x(v, j);
  }
  return out;
}

}  // namespace fastgcl
