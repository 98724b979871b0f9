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

// Linear evaluation of frozen embeddings: a multinomial logistic-regression
// probe, random train/val/test splits, stratified k-fold CV, and the
// untrained baselines.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "encoder.hpp"
#include "generators.hpp"
#include "graph.hpp"
#include "matrix.hpp"
#include "params.hpp"

namespace fastgcl {

struct SplitSpec {
  double train_frac = 0.1;
  double val_frac = 0.1;
  double test_frac = 0.8;
  std::size_t num_repeats = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Random partitions; each class is moved into the training part when the
/// drawn split misses it and another class can spare a member.
std::vector<Split> make_splits(std::span<const int> labels, const SplitSpec& spec);

/// Stratified fold assignment: members of each class are shuffled and dealt
/// round-robin, so fold sizes differ by at most one.
std::vector<std::vector<std::size_t>> stratified_folds(std::span<const int> labels, std::size_t folds,
                                                       std::uint64_t seed);

struct ProbeConfig {
  double l2_strength = 1e-3;
  std::size_t max_iters = 500;
  double tol = 1e-6;  // on the gradient norm
  double lr = 1.0;    // relative to the inverse smoothness of the loss

  void validate() const;
};

std::vector<ProbeConfig> default_probe_grid();

class Probe {
 public:
  std::vector<int> predict(const Matrix& x, std::span<const std::size_t> rows) const;
  double accuracy(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> rows) const;

  Matrix weight;  // F × C, acting on standardized features
  Matrix bias;    // 1 × C
  std::vector<double> center;
  std::vector<double> inv_scale;
  std::size_t iterations = 0;
  double grad_norm = 0.0;
};

/// Full-batch gradient descent on mean cross-entropy + l2/2·‖W‖² over the
/// training rows. Features are standardized with training statistics; the
/// step is lr / L where L bounds the loss curvature. `x` is read only.
Probe fit_probe(const Matrix& x, std::span<const int> labels, std::span<const std::size_t> train_idx,
                const ProbeConfig& cfg);

struct EvalReport {
  std::vector<double> per_run;  // test accuracy per repeat or fold
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation of per_run
  ProbeConfig selected;
  std::vector<double> grid_val_mean;  // mean validation accuracy per grid entry
  std::string protocol;
};

double sample_std(std::span<const double> xs);

/// Selects the grid entry with the best mean validation accuracy over all
/// repeats, then reports its test accuracies.
EvalReport evaluate_node(const Matrix& embeddings, std::span<const int> labels, const SplitSpec& split,
                         std::span<const ProbeConfig> grid);

/// Stratified k-fold CV. Within each fold the next fold serves as the
/// validation part for grid selection; the rest is used for fitting.
EvalReport evaluate_graph_cv(const Matrix& embeddings, std::span<const int> labels, std::size_t folds,
                             std::uint64_t seed, std::span<const ProbeConfig> grid);

/// Final anchor-layer node embeddings h^(K).
Matrix node_embeddings(const EncoderConfig& cfg, const ParamSet& params, const Graph& g);

/// Per-graph layer-concatenated sum readouts, one row per graph.
Matrix graph_embeddings(const EncoderConfig& cfg, const ParamSet& params, const GraphDataset& data);

enum class BaselineKind { kRawFeature, kRiu };
BaselineKind parse_baseline(std::string_view s);

/// Raw features (node level) or an untrained encoder's anchor output.
Matrix baseline_embeddings(BaselineKind kind, const Graph& g, const EncoderConfig& cfg, std::uint64_t seed);
Matrix baseline_embeddings(BaselineKind kind, const GraphDataset& data, const EncoderConfig& cfg,
                           std::uint64_t seed);

}  // namespace fastgcl
