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
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "encoder.hpp"
#include "evaluation.hpp"
#include "generators.hpp"
#include "objective.hpp"
#include "trainer.hpp"

namespace fastgcl {

enum class DatasetKind { kPath, kSbm, kMotifs };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::kSbm;
  std::string path;                   // kPath only
  SbmSpec sbm;                        // seed filled from the data stream
  MotifSpec motifs;                   // likewise
  std::optional<std::uint64_t> seed;  // pins the data seed independently of the root seed
};

struct EvalConfig {
  SplitSpec split;  // seed filled from the split stream
  std::size_t folds = 10;
  std::vector<double> l2_grid{1e-4, 1e-3, 1e-2, 1e-1};
  ProbeConfig probe;  // l2_strength is taken from the grid

  std::vector<ProbeConfig> grid() const;
};

struct SweepConfig {
  std::vector<std::size_t> hidden_dim;
  std::vector<std::size_t> num_layers;
  std::vector<double> lambda;
  std::vector<EdgeWeightMode> ablation;

  bool empty() const { return hidden_dim.empty() && num_layers.empty() && lambda.empty() && ablation.empty(); }
};

struct RunConfig {
  Level task = Level::kNode;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  DatasetConfig dataset;
  EncoderConfig encoder;  // input_dim is overwritten from the loaded data
  TrainConfig train;      // seed filled from the train stream
  bool record_timing = false;
  EvalConfig eval;
  SweepConfig sweep;
  double gradcheck_eps = 1e-5;

  std::uint64_t init_seed() const { return derive_seed(seed, SeedStream::kInit); }
};

/// A `section.key = value` assignment applied after the file is read. The
/// value is TOML syntax; text that does not parse as a TOML value is taken
/// as a bare string.
using Override = std::pair<std::string, std::string>;

/// Parses TOML text and applies overrides in order. Unknown keys, wrong
/// types, and invalid values raise ErrorCode::kConfig naming the key.
RunConfig parse_run_config(std::string_view toml_text, const std::vector<Override>& overrides = {},
                           std::string_view origin = "<config>");

RunConfig load_run_config(const std::string& path, const std::vector<Override>& overrides = {});

}  // namespace fastgcl
