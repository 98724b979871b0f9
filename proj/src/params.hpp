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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autodiff.hpp"
#include "common.hpp"
#include "matrix.hpp"

namespace fastgcl {

struct NamedTensor {
  std::string name;
  Matrix value;
};

/// Ordered collection of named parameter tensors.
class ParamSet {
 public:
  void add(std::string name, Matrix value);
  void append(const ParamSet& other);

  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }
  const Matrix& at(std::string_view name) const;
  Matrix& at(std::string_view name);

  std::size_t size() const { return tensors_.size(); }
  std::size_t num_values() const;
  std::vector<NamedTensor>& tensors() { return tensors_; }
  const std::vector<NamedTensor>& tensors() const { return tensors_; }
  bool all_finite() const;

  friend bool operator==(const ParamSet& a, const ParamSet& b);

 private:
  std::vector<NamedTensor> tensors_;
};

/// A ParamSet bound onto a tape, either as differentiable leaves or as
/// constants. Lookup is by name.
class BoundParams {
 public:
  BoundParams(ad::Tape& tape, const ParamSet& params, bool differentiable);
  /// Binds pre-made leaves (same order as `params`).
  BoundParams(const ParamSet& params, std::vector<ad::Var> vars);

  ad::Var operator[](std::string_view name) const;
  bool contains(std::string_view name) const { return params_->contains(name); }
  const std::vector<ad::Var>& vars() const { return vars_; }

 private:
  const ParamSet* params_;
  std::vector<ad::Var> vars_;
};

/// Glorot/Xavier uniform in ±√(6/(fan_in+fan_out)).
Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

// Binary checkpoint: "FGCLCKPT", u32 version, u32 count, then per tensor
// u32 name length, name bytes, u64 rows, u64 cols, rows·cols IEEE-754
// doubles. All integers and doubles little-endian.
void save_checkpoint(const ParamSet& params, const std::filesystem::path& path);
ParamSet load_checkpoint(const std::filesystem::path& path);

}  // namespace fastgcl
