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

#include "gradcheck.hpp"

#include <cmath>

#include "common.hpp"

namespace fastgcl {

namespace {

double evaluate(const ScalarFn& f, const std::vector<Matrix>& params) {
  ad::Tape tape;
  std::vector<ad::Var> vars;
  vars.reserve(params.size());
  for (const auto& p : params) vars.push_back(tape.constant(p));
  const ad::Var out = f(tape, vars);
  require(out.rows() == 1 && out.cols() == 1, "grad_check: function must return a 1x1 value");
  return out.value()[0];
}

}  // namespace

GradCheckResult grad_check(const ScalarFn& f, std::vector<Matrix> params, const GradCheckOptions& opts) {
  require(opts.eps > 0.0, "grad_check: eps must be positive");

  std::vector<Matrix> analytic;
  {
    ad::Tape tape;
    tape.set_corrupt_adjoints(opts.corrupt_adjoints);
    std::vector<ad::Var> vars;
    for (const auto& p : params) vars.push_back(tape.parameter(p));
    const ad::Var out = f(tape, vars);
    require(out.rows() == 1 && out.cols() == 1, "grad_check: function must return a 1x1 value");
    tape.backward(out);
    for (const auto& v : vars) analytic.push_back(tape.grad(v));
  }

  GradCheckResult res;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double orig = params[p][i];
      double plus = 0.0, minus = 0.0;
      try {
        params[p][i] = orig + opts.eps;
        plus = evaluate(f, params);
        params[p][i] = orig - opts.eps;
        minus = evaluate(f, params);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kNonFinite)
          fail(ErrorCode::kNonFinite, "grad_check: function is non-finite at a perturbed point");
        throw;
      }
      params[p][i] = orig;
      const double numeric = (plus - minus) / (2.0 * opts.eps);
      const double a = analytic[p][i];
      const double err = std::abs(a - numeric) / std::max(1.0, std::abs(numeric));
      ++res.entries;
      if (err > res.max_rel_error || res.entries == 1) {
        res.max_rel_error = err;
        res.worst_param = p;
        res.worst_entry = i;
        res.analytic = a;
        res.numeric = numeric;
      }
    }
  }
  return res;
}

}  // namespace fastgcl
