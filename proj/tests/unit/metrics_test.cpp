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

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "fedsim/core/error.hpp"
#include "fedsim/fedcore/experiment.hpp"
#include "fedsim/fedcore/state.hpp"
#include "fedsim/metrics/kernels.hpp"
#include "fedsim/metrics/measures.hpp"
#include "fedsim/objectives/dataset_task.hpp"
#include "fedsim/objectives/quadratic.hpp"

namespace fedsim::metrics {
namespace {

std::unique_ptr<objectives::QuadraticTask> quad(int clients) {
  objectives::QuadraticSpec s;
  s.dim = 7;
  s.clients = clients;
  s.hetero_scale = 1.0;
  s.noise_sigma = 0.5;
  s.seed = 3;
  return objectives::make_quadratic_family(s);
}

std::unique_ptr<objectives::LogisticTask> logistic(std::uint64_t seed) {
  objectives::ClassificationSpec s;
  s.features = 5;
  s.classes = 3;
  s.clients = 4;
  s.samples_per_client = 25;
  s.heldout_size = 300;
  s.seed = seed;
  return objectives::make_logistic_family(s);
}

fed::RunSpec inverse_t_spec(int rounds) {
  fed::RunSpec s;
  s.participating = 4;
  s.local_steps = 3;
  s.rounds = rounds;
  s.batch_size = 5;
  s.schedule.kind = fed::Schedule::Kind::kInverseT;
  s.schedule.c = 0.5;
  s.seed = 4;
  return s;
}

fed::Guards no_eta_guard() {
  fed::Guards g;
  g.allow_unsafe_eta = true;
  return g;
}

fed::FedState random_state(int clients, int dim, std::uint64_t seed) {
  Stream rng(seed, Domain::kProbe);
  ParamVec w(dim);
  for (double& v : w) v = rng.normal();
  fed::FedState s = fed::make_initial_state(w, clients, fed::Strategy::kFedAvg);
  for (auto& c : s.clients) {
    for (double& v : c.last_local_end) v = rng.normal();
  }
  return s;
}

TEST(Divergence, BruteForceForSmallPopulations) {
  for (int c = 1; c <= 5; ++c) {
    const fed::FedState s = random_state(c, 7, 10 + c);
    double expect = 0.0;
    for (const auto& m : s.clients) {
      for (int j = 0; j < 7; ++j) {
        const double d = m.last_local_end[j] - s.w_global[j];
        expect += d * d;
      }
    }
    expect /= c;
    EXPECT_NEAR(divergence(s), expect, 1e-12 * (1.0 + expect));
    EXPECT_EQ(divergence(s, Execution::kSerial), divergence(s, Execution::kParallel));
  }
}

TEST(Divergence, ZeroAtInitialState) {
  const fed::FedState s = fed::make_initial_state(ParamVec{1.0, 2.0}, 3, fed::Strategy::kFedAvg);
  EXPECT_EQ(divergence(s), 0.0);
}

TEST(Objective, MatchesTaskAndIsExecutionInvariant) {
  const auto task = quad(9);
  const ParamVec w = task->initial_point(5);
  const ObjectiveValue serial = evaluate_objective(*task, w, Execution::kSerial);
  const ObjectiveValue parallel = evaluate_objective(*task, w, Execution::kParallel);
  EXPECT_EQ(serial.loss, parallel.loss);
  EXPECT_EQ(serial.grad_norm_sq, parallel.grad_norm_sq);
  EXPECT_NEAR(serial.loss, task->global_loss(w), 1e-12);
  EXPECT_NEAR(serial.grad_norm_sq, squared_norm(objectives::full_grad(*task, -1, w)), 1e-12);
  EXPECT_EQ(evaluate_loss(*task, w, Execution::kParallel), serial.loss);
}

TEST(OptimizationError, Identity) {
  const auto task = quad(6);
  const ParamVec w = task->initial_point(6);
  EXPECT_NEAR(optimization_error(*task, w), task->global_loss(w) - task->optimal_value(),
              1e-12);
  EXPECT_NEAR(optimization_error(*task, *task->optimum()), 0.0, 1e-14);
  const auto ds = logistic(7);
  EXPECT_THROW(optimization_error(*ds, ParamVec(ds->dim())), MissingOptimum);
}

std::vector<std::pair<double, double>> power_series(double p, double noise,
                                                    std::uint64_t seed) {
  Stream rng(seed, Domain::kProbe);
  std::vector<std::pair<double, double>> s;
  for (int t = 1; t <= 200; ++t) {
    s.emplace_back(t, std::pow(t, p) * std::exp(noise * rng.normal()));
  }
  return s;
}

TEST(LoglogSlope, KnownPowers) {
  EXPECT_NEAR(loglog_slope(power_series(-1.0, 0.0, 1)), -1.0, 1e-12);
  EXPECT_NEAR(loglog_slope(power_series(0.0, 0.0, 1)), 0.0, 1e-12);
  const double noisy = loglog_slope(power_series(-2.0, 0.1, 2));
  EXPECT_GE(noisy, -2.1);
  EXPECT_LE(noisy, -1.9);
  EXPECT_NEAR(loglog_slope(power_series(-0.5, 0.0, 1), 100), -0.5, 1e-12);
}

TEST(LoglogSlope, RejectsBadInput) {
  auto s = power_series(-1.0, 0.0, 1);
  EXPECT_THROW(loglog_slope(s, 0, 4), InvalidArgument);
  EXPECT_THROW(loglog_slope(s, 10, 5), InvalidArgument);
  s[3].second = 0.0;
  EXPECT_THROW(loglog_slope(s), InvalidArgument);
}

TEST(Median, OddEvenEmpty) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), InvalidArgument);
}

TEST(Spearman, RanksAndTies) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_NEAR(spearman(x, std::vector<double>{10, 20, 30, 40, 50}), 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, std::vector<double>{5, 4, 3, 2, 1}), -1.0, 1e-15);
  // Monotone but nonlinear is still 1.
  EXPECT_NEAR(spearman(x, std::vector<double>{1, 8, 27, 64, 125}), 1.0, 1e-15);
  // Ties get average ranks: y ranks = 1.5, 1.5, 3, 4, 5.
  const double r = spearman(x, std::vector<double>{1, 1, 2, 3, 4});
  EXPECT_NEAR(r, 0.9746794344808963, 1e-12);
  EXPECT_EQ(spearman(x, std::vector<double>{2, 2, 2, 2, 2}), 0.0);
  EXPECT_THROW(spearman(x, std::vector<double>{1, 2}), InvalidArgument);
}

TEST(GeneralizationGap, VanishesOnTheTrainingSet) {
  const auto task = logistic(8);
  const ParamVec w = task->initial_point(9);
  EXPECT_NEAR(generalization_gap(*task, w, task->training_set()), 0.0, 1e-12);
  EXPECT_THROW(generalization_gap(*task, w, objectives::SampleStore{}), InvalidArgument);
}

TEST(ExcessRisk, QuadraticHasNoGeneralizationTerm) {
  const auto task = quad(6);
  fed::RunSpec spec = inverse_t_spec(20);
  spec.participating = 3;
  fed::EvalOptions opts;
  opts.guards = no_eta_guard();
  const fed::RunLog log = fed::run_experiment(spec, *task, opts);
  const ExcessRiskReport r = excess_risk_report(log, *task);
  EXPECT_EQ(r.generalization, 0.0);
  EXPECT_EQ(r.excess, r.optimization);
  EXPECT_GE(r.optimization, 0.0);
  EXPECT_GE(r.max_loss, log.records.back().train_loss);
  EXPECT_GE(r.divergence.max, r.divergence.final);
}

TEST(DatasetDifference, CountsChangedSlots) {
  const auto task = logistic(10);
  EXPECT_EQ(dataset_difference(*task, *task), 0);
  const std::vector<double> x(task->features(), 9.0);
  EXPECT_EQ(dataset_difference(*task, *task->with_replaced_sample(1, 2, x, 0)), 1);
}

TEST(Stability, IdenticalReplacementGivesZero) {
  const auto task = logistic(11);
  const int idx = task->client_samples(0)[0];
  const std::vector<double> x(task->pool().row(idx), task->pool().row(idx) + task->features());
  const auto same = task->with_replaced_sample(0, 0, x, task->pool().y[idx]);
  StabilityOptions opts;
  opts.checkpoints = {0, 5, 10};
  opts.probe_points = 100;
  const StabilityResult r = stability_probe(inverse_t_spec(10), *task, *same, opts,
                                            no_eta_guard());
  for (double e : r.epsilon) EXPECT_EQ(e, 0.0);
}

TEST(Stability, StartsAtZeroAndGrows) {
  const auto task = logistic(12);
  StabilityOptions opts;
  opts.checkpoints = {0, 10, 40};
  opts.probe_points = 200;
  opts.probe_seed = 13;
  const StabilityResult r = stability_probe(inverse_t_spec(40), *task, 0, 0, opts,
                                            no_eta_guard());
  ASSERT_EQ(r.epsilon.size(), 3u);
  EXPECT_EQ(r.epsilon[0], 0.0);
  EXPECT_GT(r.epsilon[2], 0.0);
}

TEST(Stability, RequiresInverseTAndNeighbours) {
  const auto task = logistic(14);
  StabilityOptions opts;
  opts.checkpoints = {5};
  fed::RunSpec spec = inverse_t_spec(5);
  spec.schedule.kind = fed::Schedule::Kind::kConstant;
  EXPECT_THROW(stability_probe(spec, *task, 0, 0, opts, no_eta_guard()), ConfigError);
  const std::vector<double> x(task->features(), 9.0);
  const auto two = task->with_replaced_sample(0, 0, x, 0)->with_replaced_sample(1, 0, x, 0);
  EXPECT_THROW(stability_probe(inverse_t_spec(5), *task, *two, opts, no_eta_guard()),
               InvalidArgument);
  opts.checkpoints = {6};
  EXPECT_THROW(stability_probe(inverse_t_spec(5), *task, 0, 0, opts, no_eta_guard()),
               InvalidArgument);
}

TEST(Accounting, RatiosRelativeToFedAvg) {
  Accounting a;
  a.participating = 4;
  a.local_steps = 5;
  a.rounds = 10;
  a.comm_vectors = 80;
  a.grad_evals = 400;
  a.stored_per_client = 3;
  EXPECT_DOUBLE_EQ(a.comm_ratio(), 2.0);
  EXPECT_DOUBLE_EQ(a.grad_ratio(), 2.0);
  EXPECT_DOUBLE_EQ(a.storage_ratio(), 3.0);
}

}  // namespace
}  // namespace fedsim::metrics
