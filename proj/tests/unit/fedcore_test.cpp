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

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fedsim/core/error.hpp"
#include "fedsim/fedcore/algorithm.hpp"
#include "fedsim/fedcore/experiment.hpp"
#include "fedsim/fedcore/round.hpp"
#include "fedsim/fedcore/state.hpp"
#include "fedsim/objectives/dataset_task.hpp"
#include "fedsim/objectives/quadratic.hpp"

namespace fedsim::fed {
namespace {

using objectives::QuadraticSpec;

std::unique_ptr<objectives::QuadraticTask> quad(double noise, int clients = 10,
                                                std::uint64_t seed = 1) {
  QuadraticSpec s;
  s.dim = 6;
  s.clients = clients;
  s.hetero_scale = 1.0;
  s.condition_number = 10.0;
  s.noise_sigma = noise;
  s.seed = seed;
  return objectives::make_quadratic_family(s);
}

RunSpec base_spec(Strategy strategy, double beta, int n, int k, int t) {
  RunSpec s;
  s.algorithm.strategy = strategy;
  s.algorithm.beta = beta;
  s.participating = n;
  s.local_steps = k;
  s.rounds = t;
  s.batch_size = 1;
  s.schedule.kind = Schedule::Kind::kConstant;
  s.schedule.eta0 = 0.1;
  s.seed = 5;
  return s;
}

EvalOptions unguarded() {
  EvalOptions o;
  o.guards.allow_unsafe_eta = true;
  return o;
}

TEST(RelaxedInit, Formula) {
  const ParamVec w{1.0, -2.0};
  const ParamVec last{0.0, 2.0};
  EXPECT_EQ(relaxed_init(w, last, 0.0), w);
  const ParamVec r = relaxed_init(w, last, 0.1);
  EXPECT_DOUBLE_EQ(r[0], 1.1);
  EXPECT_DOUBLE_EQ(r[1], -2.4);
  const ParamVec n = relaxed_init(w, last, -0.5);
  EXPECT_DOUBLE_EQ(n[0], 0.5);
  EXPECT_DOUBLE_EQ(n[1], 0.0);
  EXPECT_THROW(relaxed_init(w, last, std::nan("")), InvalidArgument);
  EXPECT_THROW(relaxed_init(w, ParamVec(3), 0.1), DimensionError);
}

TEST(SelectClients, SortedDistinctAndDeterministic) {
  for (int round = 0; round < 20; ++round) {
    const auto s = select_clients(50, 7, round, 9);
    ASSERT_EQ(s.size(), 7u);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::set<int>(s.begin(), s.end()).size(), 7u);
    EXPECT_GE(s.front(), 0);
    EXPECT_LT(s.back(), 50);
    EXPECT_EQ(s, select_clients(50, 7, round, 9));
  }
  EXPECT_NE(select_clients(50, 7, 0, 9), select_clients(50, 7, 1, 9));
  EXPECT_NE(select_clients(50, 7, 0, 9), select_clients(50, 7, 0, 10));
}

TEST(SelectClients, FullParticipationAndErrors) {
  const auto all = select_clients(5, 5, 3, 1);
  EXPECT_EQ(all, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_THROW(select_clients(5, 6, 0, 1), InvalidArgument);
  EXPECT_THROW(select_clients(5, 0, 0, 1), InvalidArgument);
}

TEST(SelectClients, UniformInclusion) {
  std::vector<int> hits(20, 0);
  const int rounds = 20000;
  for (int t = 0; t < rounds; ++t) {
    for (int i : select_clients(20, 4, t, 2)) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(rounds), 0.2, 0.015);
}

TEST(Aggregate, MeanAndErrors) {
  const std::vector<ParamVec> v{{1.0, 2.0}, {3.0, 4.0}, {5.0, 9.0}};
  EXPECT_EQ(aggregate(v), (ParamVec{3.0, 5.0}));
  EXPECT_EQ(aggregate(std::vector<ParamVec>{{0.25, -1.0}}), (ParamVec{0.25, -1.0}));
  EXPECT_THROW(aggregate(std::vector<ParamVec>{}), InvalidArgument);
  EXPECT_THROW(aggregate(std::vector<ParamVec>{{1.0}, {1.0, 2.0}}), DimensionError);
}

TEST(Schedule, Kinds) {
  Schedule s;
  s.eta0 = 0.5;
  s.decay = 0.9;
  s.c = 2.0;
  s.offset = 3.0;
  s.kind = Schedule::Kind::kConstant;
  EXPECT_DOUBLE_EQ(s.at(10), 0.5);
  s.kind = Schedule::Kind::kMultiplicative;
  EXPECT_DOUBLE_EQ(s.at(2), 0.5 * 0.81);
  s.kind = Schedule::Kind::kInverseT;
  EXPECT_DOUBLE_EQ(s.at(1), 0.5);
  s.kind = Schedule::Kind::kInverseSqrtT;
  EXPECT_DOUBLE_EQ(s.at(1), 1.0);
  s.kind = Schedule::Kind::kLogOverT;
  EXPECT_DOUBLE_EQ(s.at(1), 0.5 * std::log(4.0));
  for (auto k : {Schedule::Kind::kConstant, Schedule::Kind::kMultiplicative,
                 Schedule::Kind::kInverseT, Schedule::Kind::kInverseSqrtT,
                 Schedule::Kind::kLogOverT}) {
    EXPECT_EQ(parse_schedule_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_schedule_kind("cosine"), InvalidArgument);
}

TEST(Strategy, NamesAndCosts) {
  for (auto s : {Strategy::kFedAvg, Strategy::kFedAdam, Strategy::kFedSam,
                 Strategy::kScaffold, Strategy::kFedDyn, Strategy::kFedCm}) {
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_THROW(parse_strategy("fedinit"), InvalidArgument);
  EXPECT_EQ(strategy_cost(Strategy::kFedAvg).comm_per_client, 1);
  EXPECT_EQ(strategy_cost(Strategy::kFedSam).grads_per_step, 2);
  EXPECT_EQ(strategy_cost(Strategy::kScaffold).comm_per_client, 2);
  EXPECT_EQ(strategy_cost(Strategy::kScaffold).stored_per_client, 3);
  EXPECT_EQ(strategy_cost(Strategy::kFedDyn).stored_per_client, 3);
  EXPECT_EQ(strategy_cost(Strategy::kFedCm).comm_per_client, 2);
}

// Independent FedAvg with relaxed initialization: select, relax, K SGD steps
// from the per-(client, round, step) streams, pairwise mean. Must match the
// library bit for bit.
void pairwise(const std::vector<ParamVec>& v, std::size_t lo, std::size_t hi,
              std::vector<double>& out) {
  if (hi - lo == 1) {
    out.assign(v[lo].begin(), v[lo].end());
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  std::vector<double> right;
  pairwise(v, lo, mid, out);
  pairwise(v, mid, hi, right);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += right[j];
}

TEST(RunRound, MatchesReferenceFedInitLoop) {
  const auto task = quad(0.5, 12);
  RunSpec spec = base_spec(Strategy::kFedAvg, 0.1, 5, 3, 6);
  spec.schedule.kind = Schedule::Kind::kMultiplicative;
  spec.schedule.decay = 0.9;
  const ParamVec w0 = task->initial_point(3);
  const int d = task->dim();

  ParamVec w = w0;
  std::vector<ParamVec> last(task->client_count(), w0);
  for (auto exec : {Execution::kSerial, Execution::kParallel}) {
    spec.execution = exec;
    FedState state = make_initial_state(w0, task->client_count(), Strategy::kFedAvg);
    w = w0;
    last.assign(task->client_count(), w0);
    for (int t = 0; t < spec.rounds; ++t) {
      const double eta = spec.schedule.at(t);
      const auto sel = select_clients(task->client_count(), spec.participating, t, spec.seed);
      std::vector<ParamVec> locals;
      for (int i : sel) {
        ParamVec y(d);
        for (int j = 0; j < d; ++j) y[j] = w[j] + spec.algorithm.beta * (w[j] - last[i][j]);
        std::vector<double> g(d);
        for (int k = 0; k < spec.local_steps; ++k) {
          Stream rng(spec.seed, Domain::kLocalStep, i, t, k);
          task->batch_grad(task->draw_batch(i, spec.batch_size, rng), y, g);
          for (int j = 0; j < d; ++j) y[j] -= eta * g[j];
        }
        last[i] = y;
        locals.push_back(y);
      }
      std::vector<double> sum;
      pairwise(locals, 0, locals.size(), sum);
      for (int j = 0; j < d; ++j) w[j] = sum[j] / static_cast<double>(locals.size());

      const RoundOutcome out = run_round(spec, *task, state);
      EXPECT_EQ(out.selected, sel);
      ASSERT_TRUE(bit_identical(state.w_global, w)) << "round " << t;
      for (int i = 0; i < task->client_count(); ++i) {
        ASSERT_TRUE(bit_identical(state.clients[i].last_local_end, last[i]));
      }
      EXPECT_EQ(state.round, t + 1);
      EXPECT_EQ(out.grad_evals, 5 * 3);
      EXPECT_EQ(out.comm_vectors, 5);
    }
  }
}

TEST(RunRound, SerialAndParallelAgreeForEveryStrategy) {
  const auto task = quad(0.5, 12);
  for (auto strat : {Strategy::kFedAvg, Strategy::kFedAdam, Strategy::kFedSam,
                     Strategy::kScaffold, Strategy::kFedDyn, Strategy::kFedCm}) {
    RunSpec spec = base_spec(strat, 0.05, 4, 3, 8);
    const ParamVec w0 = task->initial_point(4);
    FedState a = make_initial_state(w0, task->client_count(), strat);
    FedState b = a;
    spec.execution = Execution::kSerial;
    for (int t = 0; t < spec.rounds; ++t) run_round(spec, *task, a);
    spec.execution = Execution::kParallel;
    for (int t = 0; t < spec.rounds; ++t) run_round(spec, *task, b);
    EXPECT_TRUE(bit_identical(a.w_global, b.w_global)) << to_string(strat);
  }
}

TEST(RunRound, FirstSelectionStartsAtGlobalModel) {
  // last_local_end = w0 for unselected clients, so round 0 ignores beta.
  const auto task = quad(0.0, 6);
  const ParamVec w0 = task->initial_point(5);
  FedState a = make_initial_state(w0, 6, Strategy::kFedAvg);
  FedState b = a;
  run_round(base_spec(Strategy::kFedAvg, 0.0, 3, 2, 1), *task, a);
  run_round(base_spec(Strategy::kFedAvg, 0.1, 3, 2, 1), *task, b);
  EXPECT_TRUE(bit_identical(a.w_global, b.w_global));
}

TEST(ServerUpdate, FedAdamStepIsBounded) {
  AlgorithmSpec spec;
  spec.strategy = Strategy::kFedAdam;
  FedState state;
  const ParamVec w_old{0.0, 0.0, 0.0};
  const ParamVec w_agg{1e3, -1e-3, 0.0};
  const ParamVec out = server_update(spec, w_old, w_agg, state);
  for (std::size_t j = 0; j < out.size(); ++j) {
    EXPECT_LE(std::abs(out[j]), spec.params.adam_lr + 1e-15);
  }
  EXPECT_GT(out[0], 0.0);
  EXPECT_LT(out[1], 0.0);
  EXPECT_EQ(out[2], 0.0);
  EXPECT_EQ(state.server.adam_steps, 1);
}

TEST(ServerUpdate, GlobalLearningRate) {
  AlgorithmSpec spec;
  FedState state;
  const ParamVec w_old{1.0}, w_agg{3.0};
  EXPECT_EQ(server_update(spec, w_old, w_agg, state), w_agg);
  spec.params.global_lr = 0.5;
  EXPECT_EQ(server_update(spec, w_old, w_agg, state), (ParamVec{2.0}));
}

class DriftCorrected : public ::testing::TestWithParam<Strategy> {};

TEST_P(DriftCorrected, ReachesOptimumWithoutNoise) {
  const auto task = quad(0.0, 8);
  RunSpec spec = base_spec(GetParam(), 0.0, 8, 5, 3000);
  spec.schedule.eta0 = 0.2;
  const RunLog log = run_experiment(spec, *task, unguarded());
  ASSERT_EQ(log.status, RunStatus::kOk);
  EXPECT_LT(std::sqrt(squared_distance(log.final_state.w_global, *task->optimum())), 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Strategies, DriftCorrected,
                         ::testing::Values(Strategy::kScaffold, Strategy::kFedDyn),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Validate, ReportsEveryProblem) {
  const auto task = quad(0.0, 10);
  RunSpec spec = base_spec(Strategy::kFedAvg, 0.2, 11, 0, -1);
  spec.batch_size = 0;
  const auto problems = validate_run(spec, *task, {});
  std::string all;
  for (const auto& p : problems) all += p + "\n";
  EXPECT_NE(all.find("N"), std::string::npos);
  EXPECT_NE(all.find("sqrt(6)/24"), std::string::npos);
  EXPECT_GE(problems.size(), 4u);
}

TEST(Validate, BetaAndStepGuards) {
  const auto task = quad(0.0, 10);
  RunSpec spec = base_spec(Strategy::kFedAvg, 0.1, 5, 5, 10);
  spec.schedule.eta0 = 1e-4;
  EXPECT_TRUE(validate_run(spec, *task, {}).empty());
  spec.algorithm.beta = 0.11;
  EXPECT_FALSE(validate_run(spec, *task, {}).empty());
  Guards g;
  g.allow_unsafe_beta = true;
  EXPECT_TRUE(validate_run(spec, *task, g).empty());
  spec.algorithm.beta = 0.0;
  spec.schedule.eta0 = 0.5;
  g.smoothness = 1.0;
  EXPECT_FALSE(validate_run(spec, *task, g).empty());
  g.allow_unsafe_eta = true;
  EXPECT_TRUE(validate_run(spec, *task, g).empty());
}

TEST(Validate, EtaBound) {
  EXPECT_DOUBLE_EQ(eta_bound(100, 10, 5, 2.0), std::min(10.0 / 2000.0, 1.0 / 100.0));
  EXPECT_DOUBLE_EQ(eta_bound(10, 10, 1, 1.0), 0.1);
}

TEST(Experiment, RecordsAndAccounting) {
  const auto task = quad(0.5, 10);
  RunSpec spec = base_spec(Strategy::kFedAvg, 0.1, 4, 3, 10);
  EvalOptions opts = unguarded();
  opts.record_every = 4;
  const RunLog log = run_experiment(spec, *task, opts);
  std::vector<int> ts;
  for (const auto& r : log.records) ts.push_back(r.t);
  EXPECT_EQ(ts, (std::vector<int>{0, 4, 8, 10}));
  EXPECT_EQ(log.accounting.comm_vectors, 40);
  EXPECT_EQ(log.accounting.grad_evals, 120);
  EXPECT_EQ(log.records.back().comm_vectors, 40);
  EXPECT_EQ(log.records.front().divergence, 0.0);
  EXPECT_GT(log.records.back().divergence, 0.0);
  ASSERT_TRUE(log.records.back().opt_error.has_value());
  EXPECT_GE(*log.records.back().opt_error, 0.0);
  EXPECT_FALSE(log.records.back().test_metric.has_value());
}

TEST(Experiment, ZeroRoundsGivesInitialRecord) {
  const auto task = quad(0.5, 10);
  const RunLog log = run_experiment(base_spec(Strategy::kFedAvg, 0.0, 4, 3, 0), *task,
                                    unguarded());
  ASSERT_EQ(log.records.size(), 1u);
  EXPECT_EQ(log.records[0].t, 0);
  EXPECT_EQ(log.status, RunStatus::kOk);
  EXPECT_EQ(log.final_state.w_global, log.initial_point);
}

TEST(Experiment, DivergenceStopsTheSeries) {
  const auto task = quad(0.0, 10);
  RunSpec spec = base_spec(Strategy::kFedAvg, 0.0, 10, 5, 200);
  spec.schedule.eta0 = 5.0;
  const RunLog log = run_experiment(spec, *task, unguarded());
  EXPECT_EQ(log.status, RunStatus::kDiverged);
  EXPECT_GT(log.diverged_round, 0);
  EXPECT_LT(log.diverged_round, 200);
  EXPECT_EQ(log.records.back().t, log.diverged_round);
}

TEST(Experiment, InvalidRunThrowsConfigError) {
  const auto task = quad(0.0, 10);
  EXPECT_THROW(run_experiment(base_spec(Strategy::kFedAvg, 0.0, 20, 5, 10), *task),
               ConfigError);
}

TEST(Experiment, StalenessCountsRoundsSinceSelection) {
  const auto task = quad(0.0, 10);
  const RunLog full =
      run_experiment(base_spec(Strategy::kFedAvg, 0.0, 10, 1, 3), *task, unguarded());
  for (const auto& r : full.records) {
    EXPECT_EQ(r.staleness_max, 0) << r.t;
  }
  const RunLog part =
      run_experiment(base_spec(Strategy::kFedAvg, 0.0, 1, 1, 5), *task, unguarded());
  EXPECT_EQ(part.records.back().staleness_max, 5);
}

TEST(Experiment, DatasetRunsCarryTestMetrics) {
  objectives::ClassificationSpec cs;
  cs.features = 5;
  cs.classes = 3;
  cs.clients = 6;
  cs.samples_per_client = 10;
  cs.heldout_size = 200;
  const auto task = objectives::make_logistic_family(cs);
  RunSpec spec = base_spec(Strategy::kFedAvg, 0.1, 3, 2, 4);
  spec.batch_size = 5;
  const RunLog log = run_experiment(spec, *task, unguarded());
  ASSERT_TRUE(log.records.back().test_metric.has_value());
  EXPECT_GE(*log.records.back().test_metric, 0.0);
  EXPECT_LE(*log.records.back().test_metric, 1.0);
  EXPECT_FALSE(log.records.back().opt_error.has_value());
}

}  // namespace
}  // namespace fedsim::fed
