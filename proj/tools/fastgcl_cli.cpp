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

// fastgcl: command-line front end over the C API.
//
//   fastgcl train     [--config FILE] [--section.key VALUE ...]
//   fastgcl eval      [--config FILE] [--checkpoint PATH] [--baseline raw_feature|riu]
//   fastgcl gradcheck [--config FILE]
//   fastgcl sweep     [--config FILE]
//   fastgcl gen-data  [--config FILE] --out DIR
//
// Any `--key VALUE` or `--key=VALUE` not listed above overrides the config
// entry of that name, e.g. `--train.lr 0.001` or `--seed 7`. The exit status
// is the library status code (0 on success).

#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "fastgcl/fastgcl.h"

namespace {

using ConfigPtr = std::unique_ptr<fgcl_config, decltype(&fgcl_config_free)>;

int report(fgcl_status status) {
  if (status != FGCL_OK)
    std::fprintf(stderr, "fastgcl: %s error: %s\n", fgcl_status_name(status), fgcl_last_error());
  return static_cast<int>(status);
}

// Turns leftover arguments into (key, value) pairs.
bool collect_overrides(const std::vector<std::string>& extras, std::vector<std::pair<std::string, std::string>>& out) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& arg = extras[i];
    if (arg.rfind("--", 0) != 0 || arg.size() == 2) {
      std::fprintf(stderr, "fastgcl: config error: unexpected argument '%s'\n", arg.c_str());
      return false;
    }
    std::string key = arg.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.resize(eq);
    } else if (i + 1 < extras.size()) {
      value = extras[++i];
    } else {
      std::fprintf(stderr, "fastgcl: config error: option '%s' needs a value\n", arg.c_str());
      return false;
    }
    for (auto& c : key)
      if (c == '-') c = '_';
    out.emplace_back(std::move(key), std::move(value));
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FastGCL: augmentation-free graph contrastive learning"};
  app.set_version_flag("--version", std::string(fgcl_version()));
  app.require_subcommand(1);

  std::string config_path;
  std::string checkpoint;
  std::string baseline = "none";
  std::string out_dir;
  bool corrupt = false;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "TOML run configuration")->check(CLI::ExistingFile);
    sub->add_flag("-q,--quiet", quiet, "suppress informational log lines");
    sub->allow_extras();
    return sub;
  };
  auto* train = add_common(app.add_subcommand("train", "train an encoder and write report.json, curve.csv, params.ckpt"));
  auto* eval = add_common(app.add_subcommand("eval", "linear-probe evaluation; writes eval.json"));
  eval->add_option("--checkpoint", checkpoint, "parameter checkpoint (default <output_dir>/params.ckpt)");
  eval->add_option("--baseline", baseline, "evaluate a baseline instead of a checkpoint")
      ->check(CLI::IsMember({"none", "raw_feature", "riu", "riu_encoder"}));
  auto* gradcheck = add_common(app.add_subcommand("gradcheck", "finite-difference check of the full objective"));
#ifdef FASTGCL_TEST_HOOKS
  gradcheck->add_flag("--corrupt-adjoint", corrupt, "deliberately break one backward rule (negative control)");
#endif
  auto* sweep = add_common(app.add_subcommand("sweep", "train+eval over the sweep grid; writes sweep.csv"));
  auto* gen = add_common(app.add_subcommand("gen-data", "write the configured dataset as CSV files"));
  gen->add_option("-o,--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(FGCL_ERR_CONFIG);
  }

  CLI::App* sub = app.get_subcommands().front();
  std::vector<std::pair<std::string, std::string>> overrides;
  if (!collect_overrides(sub->remaining(), overrides)) return static_cast<int>(FGCL_ERR_CONFIG);

  if (quiet) fgcl_set_log_callback([](fgcl_log_level level, const char* msg, void*) {
    if (level != FGCL_LOG_INFO) std::fprintf(stderr, "%s\n", msg);
  }, nullptr);

  fgcl_config* raw = nullptr;
  const fgcl_status loaded = config_path.empty() ? fgcl_config_parse("", &raw) : fgcl_config_load(config_path.c_str(), &raw);
  if (loaded != FGCL_OK) return report(loaded);
  ConfigPtr cfg(raw, &fgcl_config_free);
  std::vector<const char*> keys, values;
  for (const auto& [key, value] : overrides) {
    keys.push_back(key.c_str());
    values.push_back(value.c_str());
  }
  if (const auto s = fgcl_config_set_many(cfg.get(), keys.data(), values.data(), keys.size()); s != FGCL_OK)
    return report(s);

  if (sub == train) return report(fgcl_cmd_train(cfg.get()));
  if (sub == eval)
    return report(fgcl_cmd_eval(cfg.get(), checkpoint.empty() ? nullptr : checkpoint.c_str(), baseline.c_str()));
  if (sub == gradcheck) {
    double err = 0.0;
    const fgcl_status s = fgcl_cmd_gradcheck(cfg.get(), corrupt ? 1 : 0, &err);
    if (s == FGCL_OK || s == FGCL_ERR_GRADCHECK) std::printf("max_rel_error %.6e\n", err);
    return report(s);
  }
  if (sub == sweep) return report(fgcl_cmd_sweep(cfg.get()));
  return report(fgcl_cmd_gen_data(cfg.get(), out_dir.c_str()));
}
