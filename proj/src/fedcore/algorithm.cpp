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

#include "fedsim/fedcore/algorithm.hpp"

#include <cmath>
#include <string>

#include "fedsim/core/error.hpp"
#include "fedsim/fedcore/state.hpp"

namespace fedsim::fed {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kFedAvg:
      return "fedavg";
    case Strategy::kFedAdam:
      return "fedadam";
    case Strategy::kFedSam:
      return "fedsam";
    case Strategy::kScaffold:
      return "scaffold";
    case Strategy::kFedDyn:
      return "feddyn";
    case Strategy::kFedCm:
      return "fedcm";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::kFedAvg, Strategy::kFedAdam, Strategy::kFedSam,
                     Strategy::kScaffold, Strategy::kFedDyn, Strategy::kFedCm}) {
    if (name == to_string(s)) return s;
  }
  throw InvalidArgument("unknown strategy '" + std::string(name) + "'");
}

StrategyCost strategy_cost(Strategy s) {
  switch (s) {
    case Strategy::kFedAvg:
    case Strategy::kFedAdam:
      return {1, 1, 1};
    case Strategy::kFedSam:
      return {1, 2, 2};
    case Strategy::kScaffold:
      return {2, 1, 3};
    case Strategy::kFedDyn:
      return {1, 1, 3};
    case Strategy::kFedCm:
      return {2, 1, 2};
  }
  return {};
}

double Schedule::at(int t) const {
  const double tt = static_cast<double>(t) + offset;
  switch (kind) {
    case Kind::kConstant:
      return eta0;
    case Kind::kMultiplicative:
      return eta0 * std::pow(decay, t);
    case Kind::kInverseT:
      return c / tt;
    case Kind::kInverseSqrtT:
      return c / std::sqrt(tt);
    case Kind::kLogOverT:
      return c * std::log(tt) / tt;
  }
  return eta0;
}

std::string_view to_string(Schedule::Kind k) {
  switch (k) {
    case Schedule::Kind::kConstant:
      return "constant";
    case Schedule::Kind::kMultiplicative:
      return "multiplicative";
    case Schedule::Kind::kInverseT:
      return "inverse_t";
    case Schedule::Kind::kInverseSqrtT:
      return "inverse_sqrt_t";
    case Schedule::Kind::kLogOverT:
      return "log_over_t";
  }
  return "unknown";
}

Schedule::Kind parse_schedule_kind(std::string_view name) {
  using K = Schedule::Kind;
  for (K k : {K::kConstant, K::kMultiplicative, K::kInverseT, K::kInverseSqrtT,
              K::kLogOverT}) {
    if (name == to_string(k)) return k;
  }
  throw InvalidArgument("unknown schedule kind '" + std::string(name) + "'");
}

FedState make_initial_state(const ParamVec& w0, int clients, Strategy strategy) {
  FedState s;
  s.w_global = w0;
  s.clients.resize(clients);
  for (auto& c : s.clients) {
    c.last_local_end = w0;
    if (strategy == Strategy::kScaffold) c.control = ParamVec(w0.size());
    if (strategy == Strategy::kFedDyn) c.dual = ParamVec(w0.size());
  }
  if (strategy == Strategy::kScaffold) s.server.scaffold_c = ParamVec(w0.size());
  return s;
}

}  // namespace fedsim::fed
