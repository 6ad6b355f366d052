/*
 * Copyright 2026 The fedsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>

#include "fedsim/core/param_vec.hpp"
#include "fedsim/objectives/constants.hpp"
#include "fedsim/objectives/task.hpp"

namespace fedsim::objectives {

// Central-difference check of the global gradient. Returns the largest
// coordinate-wise |numeric - analytic| / max(|analytic|, 1e-8).
double finite_diff_check(const Task& task, std::span<const double> w,
                         double eps);

struct ProbeOptions {
  int probe_budget = 200;
  std::uint64_t seed = 0;
  // Probe points are centre + radius * N(0, I); the centre is the optimum
  // when known, the task's initial point otherwise.
  double radius = 1.0;
  int batch_size = 1;
};

// Least-squares fit of the assumption constants from gradient probes,
// regardless of task kind:
//   L    max ||grad f_i(w1) - grad f_i(w2)|| / ||w1 - w2|| over nearby pairs
//   G, B (1/C) sum ||grad f_i||^2 = G^2 + B^2 ||grad f||^2
//   sigma_l  sqrt of the largest mean squared batch-gradient deviation
//   L_G  max ||grad f|| over probes
TheoryConstants fit_constants(const Task& task, const ProbeOptions& opts);

// Analytic constants when the task carries them (L_G still probed),
// otherwise fit_constants.
TheoryConstants estimate_constants(const Task& task, int probe_budget,
                                   std::uint64_t seed);

struct OracleResult {
  ParamVec point;
  bool converged = false;
  double grad_norm = 0.0;
  int iterations = 0;
};

inline constexpr double kOracleTolerance = 1e-8;

// Full-batch accelerated gradient descent on f (backtracking step size,
// gradient-based restart) until ||grad f|| <= 1e-8. The returned point is
// cached on the task as its optimum whether or not it converged; callers
// check `converged`.
OracleResult centralized_oracle(Task& task, int steps, double lr,
                                std::uint64_t seed);

}  // namespace fedsim::objectives
