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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fedsim/fedcore/round.hpp"
#include "fedsim/fedcore/state.hpp"
#include "fedsim/metrics/records.hpp"
#include "fedsim/objectives/task.hpp"

namespace fedsim::fed {

struct Guards {
  bool allow_unsafe_beta = false;
  bool allow_unsafe_eta = false;
  // Smoothness used by the step-size guard; estimated when absent.
  std::optional<double> smoothness;
};

// Every problem with running `spec` on `task`, empty when runnable.
std::vector<std::string> validate_run(const RunSpec& spec,
                                      const objectives::Task& task,
                                      const Guards& guards);

// Largest constant step size the guard admits: min{N/(2CKL), 1/(NKL)}.
double eta_bound(int clients, int participating, int local_steps, double L);

struct EvalOptions {
  // Record every `record_every` rounds plus the final state. The loss
  // blow-up test runs on recorded rounds; non-finite parameters are caught
  // every round.
  int record_every = 1;
  bool test_metrics = true;
  // Loss blow-up factor relative to the initial gap that counts as diverged.
  double blowup_factor = 1e6;
  Guards guards;
  // Called with the state at the start of each round (and the final state).
  std::function<void(const FedState&)> observer;
};

enum class RunStatus { kOk, kDiverged };

struct RunLog {
  std::vector<metrics::RoundRecord> records;
  FedState final_state;
  metrics::Accounting accounting;
  RunStatus status = RunStatus::kOk;
  int diverged_round = -1;
  double max_loss = 0.0;
  ParamVec initial_point;
};

// T rounds from task.initial_point(seed). Throws ConfigError when
// validate_run reports problems. A diverged run stops at the round where the
// loss became non-finite or blew up; records end there.
RunLog run_experiment(const RunSpec& spec, const objectives::Task& task,
                      const EvalOptions& opts = {});

// Same, from an explicit starting point.
RunLog run_experiment_from(const RunSpec& spec, const objectives::Task& task,
                           const ParamVec& w0, const EvalOptions& opts = {});

}  // namespace fedsim::fed
