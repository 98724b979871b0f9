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

#include <vector>

#include "matrix.hpp"
#include "params.hpp"

namespace fastgcl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

/// Adam with decoupled weight decay. Each step first shrinks the parameter
/// by lr·wd·p, then applies the bias-corrected Adam delta.
class Adam {
 public:
  Adam(AdamConfig cfg, const ParamSet& params, std::vector<bool> trainable = {});

  /// `grads` is aligned with `params`. Tensors marked non-trainable are
  /// left untouched (no decay either).
  void step(ParamSet& params, const std::vector<Matrix>& grads);

  std::size_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::vector<bool> trainable_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  std::size_t t_ = 0;
};

}  // namespace fastgcl
