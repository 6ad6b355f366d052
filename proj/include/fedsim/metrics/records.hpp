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

#include <optional>

namespace fedsim::metrics {

// Telemetry for the model state at the start of round t (equivalently after
// round t-1). Divergence is taken before round t overwrites client memory.
struct RoundRecord {
  int t = 0;
  double eta = 0.0;
  double train_loss = 0.0;
  double grad_norm_sq = 0.0;
  double divergence = 0.0;
  std::optional<double> opt_error;
  std::optional<double> test_loss;
  std::optional<double> test_metric;
  double staleness_mean = 0.0;
  int staleness_max = 0;
  // Cumulative through round t-1.
  long long comm_vectors = 0;
  long long grad_evals = 0;
};

// Operation counts of a run, in d-dimensional vectors.
struct Accounting {
  long long comm_vectors = 0;
  long long grad_evals = 0;
  int stored_per_client = 1;
  int rounds = 0;
  int participating = 0;
  int local_steps = 0;
  int dim = 0;

  // Relative to FedAvg's N vectors, N K gradients and one stored vector.
  double comm_ratio() const;
  double grad_ratio() const;
  double storage_ratio() const { return stored_per_client; }
};

}  // namespace fedsim::metrics
