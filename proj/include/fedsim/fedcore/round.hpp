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
#include <span>
#include <vector>

#include "fedsim/core/execution.hpp"
#include "fedsim/core/param_vec.hpp"
#include "fedsim/fedcore/algorithm.hpp"
#include "fedsim/fedcore/state.hpp"
#include "fedsim/objectives/task.hpp"

namespace fedsim::fed {

// w + beta * (w - w_last_local)
ParamVec relaxed_init(const ParamVec& w_global, const ParamVec& w_last_local,
                      double beta);

// Uniform N-subset of [0, C), sorted; a function of (seed, round) only.
std::vector<int> select_clients(int clients, int participating, int round,
                                std::uint64_t seed);

// Everything a client sees during one round of local training.
struct LocalContext {
  int round = 0;
  double eta = 0.1;
  int local_steps = 5;
  int batch_size = 50;
  std::uint64_t seed = 0;
  const ParamVec* w_global = nullptr;      // w^t (FedDyn prox centre)
  const ParamVec* server_control = nullptr;  // SCAFFOLD c
  const ParamVec* client_control = nullptr;  // SCAFFOLD c_i
  const ParamVec* dual = nullptr;            // FedDyn lambda_i
  const ParamVec* momentum = nullptr;        // FedCM global direction
};

struct LocalResult {
  ParamVec w_final;
  ParamVec new_control;  // SCAFFOLD only
  ParamVec new_dual;     // FedDyn only
  long long grad_evals = 0;
  bool diverged = false;
};

// K local iterations of the strategy's rule from w_init. Iteration k of
// client i in round t draws from the stream (seed, i, t, k).
LocalResult local_train(const AlgorithmSpec& spec, const objectives::Task& task,
                        int client, const ParamVec& w_init,
                        const LocalContext& ctx);

// Unweighted mean, pairwise-summed in input order.
ParamVec aggregate(std::span<const ParamVec> locals);

// Server step after aggregation; mutates the server-side auxiliaries.
ParamVec server_update(const AlgorithmSpec& spec, const ParamVec& w_old,
                       const ParamVec& w_aggregated, FedState& state);

struct RunSpec {
  AlgorithmSpec algorithm;
  int participating = 10;  // N
  int local_steps = 5;     // K
  int rounds = 500;        // T
  int batch_size = 50;
  Schedule schedule;
  std::uint64_t seed = 0;
  Execution execution = Execution::kParallel;
};

struct RoundOutcome {
  std::vector<int> selected;
  long long comm_vectors = 0;
  long long grad_evals = 0;
  bool diverged = false;
};

// One synchronous round: select, relax, train (concurrently), aggregate,
// server update. Updates `state` in place and advances state.round.
RoundOutcome run_round(const RunSpec& spec, const objectives::Task& task,
                       FedState& state);

}  // namespace fedsim::fed
