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

// The subcommands behind the C API. Each throws fastgcl::Error on failure;
// the error code is the process exit status.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "evaluation.hpp"
#include "gradcheck.hpp"
#include "run_config.hpp"
#include "trainer.hpp"

namespace fastgcl {

enum class LogLevel { kInfo = 0, kWarn = 1, kError = 2 };
using LogSink = std::function<void(LogLevel, const std::string&)>;

/// Replaces the process-wide log sink; an empty sink restores stderr.
void set_log_sink(LogSink sink);
void log_message(LogLevel level, const std::string& msg);

inline constexpr double kGradCheckThreshold = 1e-4;
inline constexpr std::size_t kGradCheckMaxNodes = 16;

/// The dataset a config names, in whichever form its task uses.
struct LoadedData {
  Level level = Level::kNode;
  Graph graph;           // node level
  GraphDataset dataset;  // graph level
  std::size_t feature_dim = 0;
  std::size_t num_nodes = 0;
};

LoadedData load_data(const RunConfig& cfg);

/// Encoder config with input_dim taken from the data.
EncoderConfig resolve_encoder(const RunConfig& cfg, const LoadedData& data);

TrainResult run_training(const RunConfig& cfg, const LoadedData& data);

/// `params` null with a baseline selects the baseline embeddings.
EvalReport run_evaluation(const RunConfig& cfg, const LoadedData& data, const ParamSet* params,
                          std::optional<BaselineKind> baseline);

void write_curve_csv(const TrainReport& report, bool record_timing, const std::filesystem::path& path);
void write_train_report(const RunConfig& cfg, const TrainReport& report, const std::filesystem::path& path);
void write_eval_json(const EvalReport& report, const std::string& source, const std::filesystem::path& path);

/// Writes report.json, curve.csv, and params.ckpt into cfg.output_dir.
TrainResult cmd_train(const RunConfig& cfg);

/// `checkpoint` empty selects <output_dir>/params.ckpt; `baseline` is
/// "", "none", "raw_feature", or "riu". Writes <output_dir>/eval.json.
EvalReport cmd_eval(const RunConfig& cfg, const std::string& checkpoint, const std::string& baseline);

/// Checks the full objective at the initial parameters. Refuses graphs with
/// more than kGradCheckMaxNodes nodes (kPrecondition). The caller decides
/// pass or fail from max_rel_error.
GradCheckResult cmd_gradcheck(const RunConfig& cfg, bool corrupt_adjoints);

struct SweepSummary {
  std::size_t cells = 0;
  std::size_t succeeded = 0;
};

/// One train+eval per cell of the sweep product; writes sweep.csv and a
/// subdirectory per cell. Throws kSweep when every cell failed.
SweepSummary cmd_sweep(const RunConfig& cfg);

/// Writes the configured dataset in the CSV directory layout.
void cmd_gen_data(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace fastgcl
