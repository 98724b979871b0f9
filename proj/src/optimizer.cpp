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

#include "optimizer.hpp"

#include <cmath>

#include "common.hpp"

namespace fastgcl {

Adam::Adam(AdamConfig cfg, const ParamSet& params, std::vector<bool> trainable)
    : cfg_(cfg), trainable_(std::move(trainable)) {
  require(cfg_.lr > 0.0, "Adam: lr must be positive");
  require(cfg_.weight_decay >= 0.0, "Adam: weight_decay must be >= 0");
  if (trainable_.empty()) trainable_.assign(params.size(), true);
  require(trainable_.size() == params.size(), "Adam: trainable mask length mismatch");
  for (const auto& t : params.tensors()) {
    m_.emplace_back(t.value.rows(), t.value.cols());
    v_.emplace_back(t.value.rows(), t.value.cols());
  }
}

void Adam::step(ParamSet& params, const std::vector<Matrix>& grads) {
  require(params.size() == m_.size() && grads.size() == m_.size(), "Adam: parameter count changed");
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (!trainable_[i]) continue;
    Matrix& p = params.tensors()[i].value;
    const Matrix& g = grads[i];
    require(p.same_shape(g) && p.same_shape(m_[i]), "Adam: shape mismatch for " + params.tensors()[i].name);
    for (std::size_t j = 0; j < p.size(); ++j) {
      p[j] -= cfg_.lr * cfg_.weight_decay * p[j];
      m_[i][j] = cfg_.beta1 * m_[i][j] + (1.0 - cfg_.beta1) * g[j];
      v_[i][j] = cfg_.beta2 * v_[i][j] + (1.0 - cfg_.beta2) * g[j] * g[j];
      const double mhat = m_[i][j] / bc1;
      const double vhat = v_[i][j] / bc2;
      p[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace fastgcl
