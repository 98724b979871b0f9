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

#include <cstdint>
#include <functional>
#include <vector>

#include "encoder.hpp"
#include "generators.hpp"
#include "gradcheck.hpp"
#include "objective.hpp"
#include "params.hpp"

namespace fastgcl {

struct TrainConfig {
  std::size_t epochs = 100;
  double lr = 1e-3;
  double weight_decay = 0.0;
  double lambda = 0.01;
  std::uint64_t seed = 0;  // shuffling and random edge weights
  Level level = Level::kNode;
  std::size_t batch_size = 32;
  EdgeWeightMode ablation = EdgeWeightMode::kLearned;
  std::size_t log_every = 0;
  bool resample_random = false;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double l_ssl = 0.0;
  double l_norm = 0.0;
  double ms = 0.0;
  double min_edge_weight = 0.0;
  double max_edge_weight = 0.0;
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  double total_ms = 0.0;
};

struct TrainResult {
  TrainReport report;
  ParamSet params;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Full-batch node-level training: one optimizer step per epoch.
TrainResult train(const Graph& g, const EncoderConfig& enc, const TrainConfig& cfg, ParamSet params,
                  const EpochCallback& on_epoch = {});

/// Graph-level training over shuffled minibatches of `cfg.batch_size` graphs.
TrainResult train(const GraphDataset& data, const EncoderConfig& enc, const TrainConfig& cfg, ParamSet params,
                  const EpochCallback& on_epoch = {});

/// The scalar objective L(θ, φ) on one prepared graph, as a function of the
/// parameter tensors in `layout` order. Used for gradient checking.
ScalarFn objective_function(const EncoderConfig& enc, const ParamSet& layout, const PreparedGraph& prep,
                            Level level, double lambda, EdgeWeightMode mode, const Matrix* fixed_weights = nullptr);

}  // namespace fastgcl
