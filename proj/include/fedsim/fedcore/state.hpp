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

#include <vector>

#include "fedsim/core/param_vec.hpp"
#include "fedsim/fedcore/algorithm.hpp"

namespace fedsim::fed {

struct ClientMemory {
  ParamVec last_local_end;  // w_{i,K}^{t-1}; w^0 until first selected
  ParamVec control;         // SCAFFOLD c_i
  ParamVec dual;            // FedDyn lambda_i
  int last_round = -1;      // -1 = never selected
};

struct ServerAux {
  ParamVec adam_m;
  ParamVec adam_v;
  int adam_steps = 0;
  ParamVec scaffold_c;
  // FedCM needs w^{t-1} and eta_{t-1}.
  ParamVec prev_global;
  double prev_eta = 0.0;
  bool has_prev = false;
};

struct FedState {
  ParamVec w_global;
  int round = 0;
  std::vector<ClientMemory> clients;
  ServerAux server;

  int dim() const { return static_cast<int>(w_global.size()); }
  int client_count() const { return static_cast<int>(clients.size()); }
};

// Every client's last local end state starts at w0.
FedState make_initial_state(const ParamVec& w0, int clients, Strategy strategy);

}  // namespace fedsim::fed
