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

#include <functional>
#include <span>
#include <vector>

#include "autodiff.hpp"

namespace fastgcl {

/// Builds a scalar on `tape` from parameter leaves bound in order.
using ScalarFn = std::function<ad::Var(ad::Tape&, std::span<const ad::Var>)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_param = 0;
  std::size_t worst_entry = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries = 0;
};

struct GradCheckOptions {
  double eps = 1e-5;
  bool corrupt_adjoints = false;
};

/// Compares reverse-mode gradients against central differences for every
/// parameter entry. Error per entry is |analytic − numeric| / max(1, |numeric|).
GradCheckResult grad_check(const ScalarFn& f, std::vector<Matrix> params, const GradCheckOptions& opts = {});

}  // namespace fastgcl
