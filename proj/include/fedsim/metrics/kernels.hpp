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

#include <span>

#include "fedsim/core/execution.hpp"
#include "fedsim/fedcore/state.hpp"
#include "fedsim/objectives/task.hpp"

namespace fedsim::metrics {

struct ObjectiveValue {
  double loss = 0.0;
  double grad_norm_sq = 0.0;
};

// f(w) and ||grad f(w)||^2. Client terms are computed independently (in
// parallel for kParallel) and reduced serially in client order, so both
// paths give the same bits.
ObjectiveValue evaluate_objective(const objectives::Task& task,
                                  std::span<const double> w, Execution exec);
double evaluate_loss(const objectives::Task& task, std::span<const double> w,
                     Execution exec);

// (1/C) sum_i ||last_local_end_i - w_global||^2 over all C clients.
double divergence(const fed::FedState& state,
                  Execution exec = Execution::kSerial);

}  // namespace fedsim::metrics
