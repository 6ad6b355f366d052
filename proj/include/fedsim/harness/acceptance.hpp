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
#include <string>
#include <string_view>

namespace fedsim::harness {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string_view name;
  // Equivalent CLI invocation(s), relative to the repository root.
  std::string_view invocation;
  double time_limit_seconds;
  CriterionResult (*run)();
};

// Expected cost ratios relative to FedAvg: vectors exchanged per client,
// gradient evaluations per local step, vectors stored per client.
struct CostExpectation {
  std::string_view strategy;  // "fedinit" = fedavg with beta != 0
  int comm;
  int grads;
  int stored;
};
std::span<const CostExpectation> expected_costs();

// The acceptance registry, in id order.
std::span<const Criterion> acceptance_criteria();

// Runs one criterion, timing it and folding the time limit into the result.
CriterionResult run_criterion(const Criterion& c);

// Config text behind a named acceptance run, e.g. "beta_ordering". Throws for
// unknown names.
std::string_view acceptance_config(std::string_view name);
// The shipped configs/acceptance/<name>.conf: license header plus that text.
std::string acceptance_config_file(std::string_view name);
std::span<const std::string_view> acceptance_config_names();

}  // namespace fedsim::harness
