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

// Serial reference against OpenMP kernels: objective evaluation, client
// divergence and one full training round. Arg 0 = serial, 1 = parallel.

#include <memory>

#include <benchmark/benchmark.h>

#include "fedsim/core/execution.hpp"
#include "fedsim/fedcore/round.hpp"
#include "fedsim/fedcore/state.hpp"
#include "fedsim/metrics/kernels.hpp"
#include "fedsim/objectives/dataset_task.hpp"

namespace {

using namespace fedsim;

const objectives::LogisticTask& task() {
  static const auto t = [] {
    objectives::ClassificationSpec s;
    s.clients = 100;
    s.samples_per_client = 50;
    s.seed = 1;
    return objectives::make_logistic_family(s);
  }();
  return *t;
}

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void BM_EvaluateObjective(benchmark::State& state) {
  const ParamVec w = task().initial_point(2);
  const Execution exec = exec_of(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::evaluate_objective(task(), w, exec));
  }
}
BENCHMARK(BM_EvaluateObjective)->Arg(0)->Arg(1);

void BM_Divergence(benchmark::State& state) {
  fed::FedState s = fed::make_initial_state(ParamVec(task().dim(), 0.5), task().client_count(),
                                            fed::Strategy::kFedAvg);
  Stream rng(3, Domain::kProbe);
  for (auto& c : s.clients) {
    for (double& v : c.last_local_end) v = rng.normal();
  }
  const Execution exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::divergence(s, exec));
}
BENCHMARK(BM_Divergence)->Arg(0)->Arg(1);

void BM_RunRound(benchmark::State& state) {
  fed::RunSpec spec;
  spec.algorithm.beta = 0.1;
  spec.participating = 10;
  spec.local_steps = 5;
  spec.batch_size = 50;
  spec.execution = exec_of(state);
  fed::FedState s = fed::make_initial_state(task().initial_point(4), task().client_count(),
                                            fed::Strategy::kFedAvg);
  for (auto _ : state) benchmark::DoNotOptimize(fed::run_round(spec, task(), s));
}
BENCHMARK(BM_RunRound)->Arg(0)->Arg(1);

}  // namespace

int main(int argc, char** argv) {
  fedsim::apply_worker_override();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
