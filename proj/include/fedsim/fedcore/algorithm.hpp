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

#include <string_view>

namespace fedsim::fed {

enum class Strategy { kFedAvg, kFedAdam, kFedSam, kScaffold, kFedDyn, kFedCm };

std::string_view to_string(Strategy s);
// Accepts the six strategy names; "fedinit" is not a strategy but FedAvg
// with a relaxed initialization and is resolved by the config layer.
Strategy parse_strategy(std::string_view name);

struct StrategyParams {
  // FedAdam server optimizer.
  double adam_lr = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.99;
  double adam_eps = 1e-3;
  // FedSAM ascent radius.
  double sam_rho = 0.1;
  // FedDyn regularization coefficient.
  double dyn_alpha = 0.1;
  // FedCM client-level coefficient (weight of the local gradient).
  double cm_alpha = 0.1;
  double global_lr = 1.0;
};

// Local training rule plus the relaxed coefficient used to initialise each
// selected client. beta = 0 leaves every strategy unchanged.
struct AlgorithmSpec {
  Strategy strategy = Strategy::kFedAvg;
  double beta = 0.0;
  StrategyParams params;
  // false starts local training at w^t directly, bypassing the relaxation.
  bool relaxed = true;
};

// Per-round cost of a strategy in units of d-dimensional vectors.
struct StrategyCost {
  int comm_per_client = 1;       // vectors exchanged per participating client
  int grads_per_step = 1;        // gradient evaluations per local iteration
  int stored_per_client = 1;     // vectors held on each client
};

// Per-round costs. Relaxed initialization adds nothing: the
// last local end state is the client's own model.
StrategyCost strategy_cost(Strategy s);

// Learning-rate schedule eta_t for round t.
struct Schedule {
  enum class Kind { kConstant, kMultiplicative, kInverseT, kInverseSqrtT, kLogOverT };

  Kind kind = Kind::kMultiplicative;
  double eta0 = 0.1;
  double decay = 0.998;
  // Scale for the t-dependent kinds.
  double c = 0.1;
  // Round offset t0 for the t-dependent kinds: c / (t + t0), etc.
  double offset = 1.0;

  double at(int t) const;
};

std::string_view to_string(Schedule::Kind k);
Schedule::Kind parse_schedule_kind(std::string_view name);

}  // namespace fedsim::fed
