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
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "fedsim/core/error.hpp"
#include "fedsim/objectives/analysis.hpp"
#include "fedsim/objectives/dataset_task.hpp"
#include "fedsim/objectives/quadratic.hpp"

namespace fedsim::objectives {
namespace {

Eigen::MatrixXd hessian_of(const QuadraticTask& task) {
  const int d = task.dim();
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(task.hessian().data(), d, d);
}

QuadraticSpec quad_spec(std::uint64_t seed) {
  QuadraticSpec s;
  s.dim = 8;
  s.clients = 7;
  s.hetero_scale = 0.7;
  s.condition_number = 25.0;
  s.noise_sigma = 0.3;
  s.seed = seed;
  return s;
}

ClassificationSpec small_classification(std::uint64_t seed) {
  ClassificationSpec s;
  s.features = 6;
  s.classes = 4;
  s.clients = 5;
  s.samples_per_client = 20;
  s.dirichlet = 0.5;
  s.seed = seed;
  s.hidden = 5;
  return s;
}

ParamVec random_point(const Task& task, std::uint64_t seed, double scale = 1.0) {
  ParamVec w = task.initial_point(seed);
  Stream rng(seed, Domain::kProbe, 99);
  for (double& v : w) v += scale * rng.normal();
  return w;
}

TEST(Quadratic, OptimumMatchesEigenSolve) {
  const auto task = make_quadratic_family(quad_spec(1));
  const Eigen::MatrixXd a = hessian_of(*task);
  const Eigen::VectorXd b =
      Eigen::Map<const Eigen::VectorXd>(task->mean_offset().data(), task->dim());
  const Eigen::VectorXd w = a.ldlt().solve(b);
  ASSERT_TRUE(task->optimum().has_value());
  EXPECT_TRUE(task->optimum_is_exact());
  for (int j = 0; j < task->dim(); ++j) {
    EXPECT_NEAR((*task->optimum())[j], w[j], 1e-12 * (1.0 + std::abs(w[j])));
  }
  EXPECT_NEAR(task->optimal_value(), task->global_loss(*task->optimum()), 1e-12);
}

TEST(Quadratic, SpectrumMatchesEigen) {
  const auto task = make_quadratic_family(quad_spec(2));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hessian_of(*task));
  const Eigen::VectorXd ev = es.eigenvalues();
  ASSERT_EQ(task->eigenvalues().size(), static_cast<std::size_t>(ev.size()));
  for (int j = 0; j < ev.size(); ++j) EXPECT_NEAR(task->eigenvalues()[j], ev[j], 1e-12);
  EXPECT_NEAR(ev.maxCoeff() / ev.minCoeff(), 25.0, 1e-9);
  const auto& c = *task->analytic_constants();
  EXPECT_NEAR(c.L, ev.maxCoeff(), 1e-12);
  EXPECT_NEAR(c.mu, ev.minCoeff(), 1e-12);
}

TEST(Quadratic, HeterogeneityOffsetsAreCentred) {
  const auto task = make_quadratic_family(quad_spec(3));
  const int d = task->dim();
  std::vector<double> mean(d, 0.0);
  for (int i = 0; i < task->client_count(); ++i) {
    const double r = std::sqrt(squared_distance(task->offset(i), task->mean_offset()));
    EXPECT_NEAR(r, 0.7, 1e-12);
    for (int j = 0; j < d; ++j) mean[j] += task->offset(i)[j];
  }
  for (int j = 0; j < d; ++j) {
    EXPECT_NEAR(mean[j] / task->client_count(), task->mean_offset()[j], 1e-12);
  }
  EXPECT_NEAR(task->analytic_constants()->G, 0.7, 1e-12);
}

TEST(Quadratic, HeterogeneityOrderFollowsScale) {
  double prev = -1.0;
  for (double scale : {0.0, 0.5, 2.0}) {
    QuadraticSpec s = quad_spec(4);
    s.hetero_scale = scale;
    const auto task = make_quadratic_family(s);
    TheoryConstants fit = fit_constants(*task, ProbeOptions{200, 5, 1.0, 1});
    EXPECT_GT(fit.G, prev - 1e-9) << "scale " << scale;
    EXPECT_NEAR(fit.G, scale, 0.05 + 0.05 * scale);
    prev = fit.G;
  }
}

TEST(Quadratic, SatisfiesPlAndSmoothness) {
  const auto task = make_quadratic_family(quad_spec(5));
  const auto& c = *task->analytic_constants();
  const double fstar = task->optimal_value();
  for (int k = 0; k < 50; ++k) {
    const ParamVec x = random_point(*task, 100 + k, 3.0);
    const ParamVec y = random_point(*task, 200 + k, 3.0);
    const ParamVec gx = full_grad(*task, kAllClients, x);
    const ParamVec gy = full_grad(*task, kAllClients, y);
    EXPECT_GE(0.5 * squared_norm(gx), c.mu * (task->global_loss(x) - fstar) - 1e-10);
    EXPECT_LE(std::sqrt(squared_distance(gx, gy)),
              c.L * std::sqrt(squared_distance(x, y)) + 1e-10);
  }
}

TEST(Quadratic, StochasticGradientIsUnbiased) {
  const auto task = make_quadratic_family(quad_spec(6));
  const ParamVec w = random_point(*task, 7);
  const ParamVec g = full_grad(*task, 2, w);
  const int n = 20000;
  std::vector<double> acc(task->dim(), 0.0);
  for (int s = 0; s < n; ++s) {
    Stream rng(8, Domain::kLocalStep, 2, 0, s);
    const ParamVec gs = stochastic_grad(*task, 2, w, 1, rng);
    for (int j = 0; j < task->dim(); ++j) acc[j] += gs[j];
  }
  // Standard error per coordinate is sigma / sqrt(d n).
  const double tol = 5.0 * 0.3 / std::sqrt(task->dim() * static_cast<double>(n));
  for (int j = 0; j < task->dim(); ++j) EXPECT_NEAR(acc[j] / n, g[j], tol);
}

TEST(Quadratic, RejectsInvalidShapes) {
  QuadraticSpec s = quad_spec(9);
  s.condition_number = 0.5;
  EXPECT_THROW(make_quadratic_family(s), InvalidArgument);
  s = quad_spec(9);
  s.clients = 1;
  EXPECT_THROW(make_quadratic_family(s), InvalidArgument);
  const auto task = make_quadratic_family(quad_spec(9));
  EXPECT_THROW(loss(*task, 99, ParamVec(task->dim())), InvalidArgument);
  EXPECT_THROW(loss(*task, 0, ParamVec(task->dim() + 1)), DimensionError);
}

TEST(Quadratic, GeneratorIsDeterministic) {
  const auto a = make_quadratic_family(quad_spec(10));
  const auto b = make_quadratic_family(quad_spec(10));
  const auto c = make_quadratic_family(quad_spec(11));
  EXPECT_EQ(a->hessian(), b->hessian());
  EXPECT_EQ(a->mean_offset(), b->mean_offset());
  EXPECT_NE(a->hessian(), c->hessian());
}

class DatasetGradient : public ::testing::TestWithParam<TaskKind> {};

std::unique_ptr<DatasetTask> make_dataset(TaskKind kind, std::uint64_t seed) {
  if (kind == TaskKind::kLogistic) return make_logistic_family(small_classification(seed));
  return make_mlp_family(small_classification(seed));
}

TEST_P(DatasetGradient, MatchesCentralDifferences) {
  const auto task = make_dataset(GetParam(), 12);
  for (int k = 0; k < 5; ++k) {
    const ParamVec w = random_point(*task, 300 + k, 0.5);
    EXPECT_LT(finite_diff_check(*task, w, 1e-5), 1e-4);
  }
}

TEST_P(DatasetGradient, ClientLossIsMeanOfSampleLosses) {
  const auto task = make_dataset(GetParam(), 13);
  const ParamVec w = random_point(*task, 14, 0.5);
  for (int i = 0; i < task->client_count(); ++i) {
    double s = 0.0;
    for (int idx : task->client_samples(i)) {
      s += task->sample_loss(w, task->pool().row(idx), task->pool().y[idx]);
    }
    s /= static_cast<double>(task->client_samples(i).size());
    EXPECT_NEAR(task->client_loss(i, w), s, 1e-12);
    EXPECT_NEAR(task->batch_loss(task->full_batch(i), w), s, 1e-12);
  }
}

TEST_P(DatasetGradient, FusedLossGradMatchesSeparate) {
  const auto task = make_dataset(GetParam(), 15);
  const ParamVec w = random_point(*task, 16, 0.5);
  ParamVec g1(task->dim()), g2(task->dim());
  const double l = task->client_loss_grad(1, w, g1.span());
  task->client_grad(1, w, g2.span());
  EXPECT_NEAR(l, task->client_loss(1, w), 1e-13);
  for (int j = 0; j < task->dim(); ++j) EXPECT_NEAR(g1[j], g2[j], 1e-13);
}

TEST_P(DatasetGradient, ExpectedMinibatchGradientIsClientGradient) {
  const auto task = make_dataset(GetParam(), 17);
  const ParamVec w = random_point(*task, 18, 0.5);
  const ParamVec g = full_grad(*task, 0, w);
  const int n = 20000;
  std::vector<double> acc(task->dim(), 0.0);
  for (int s = 0; s < n; ++s) {
    Stream rng(19, Domain::kLocalStep, 0, 0, s);
    const ParamVec gs = stochastic_grad(*task, 0, w, 4, rng);
    for (int j = 0; j < task->dim(); ++j) acc[j] += gs[j];
  }
  for (int j = 0; j < task->dim(); ++j) {
    EXPECT_NEAR(acc[j] / n, g[j], 0.02 * (1.0 + std::abs(g[j])));
  }
}

INSTANTIATE_TEST_SUITE_P(Tasks, DatasetGradient,
                         ::testing::Values(TaskKind::kLogistic, TaskKind::kMlp),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Dataset, ReplacedSampleChangesOneSlot) {
  const auto task = make_logistic_family(small_classification(20));
  const std::vector<double> x(task->features(), 0.25);
  const auto other = task->with_replaced_sample(2, 3, x, 1);
  EXPECT_EQ(other->client_samples(2).size(), task->client_samples(2).size());
  const ParamVec w = random_point(*task, 21, 0.5);
  EXPECT_EQ(task->client_loss(0, w), other->client_loss(0, w));
  EXPECT_NE(task->client_loss(2, w), other->client_loss(2, w));
}

TEST(Dataset, TrainingSetHasEverySlot) {
  const auto task = make_logistic_family(small_classification(22));
  EXPECT_EQ(task->training_set().size(), 5 * 20);
  EXPECT_GE(task->heldout().size(), 1000);
}

TEST(Oracle, ConvergesOnLogistic) {
  auto task = make_logistic_family(small_classification(23));
  const OracleResult r = centralized_oracle(*task, 5000, 1.0, 24);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.grad_norm, kOracleTolerance);
  ASSERT_TRUE(task->optimum().has_value());
  EXPECT_FALSE(task->optimum_is_exact());
  const ParamVec w = random_point(*task, 25, 0.5);
  EXPECT_LE(task->global_loss(*task->optimum()), task->global_loss(w));
}

TEST(Oracle, KeepsExactOptimum) {
  auto task = make_quadratic_family(quad_spec(26));
  const ParamVec exact = *task->optimum();
  centralized_oracle(*task, 10, 0.1, 27);
  EXPECT_EQ(*task->optimum(), exact);
}

TEST(Constants, EstimatedSmoothnessBoundsLogistic) {
  const auto task = make_logistic_family(small_classification(28));
  const TheoryConstants c = estimate_constants(*task, 200, 29);
  EXPECT_GT(c.L, 0.0);
  EXPECT_GT(c.sigma_l, 0.0);
  EXPECT_GE(c.B, 0.0);
  EXPECT_THROW(estimate_constants(*task, 10, 29), InvalidArgument);
}

TEST(Constants, SafetyFunctions) {
  EXPECT_DOUBLE_EQ(kappa1(0.0), 17.0);
  EXPECT_DOUBLE_EQ(kappa2(0.0), 13.0);
  EXPECT_NEAR(kBetaSafetyBound, std::sqrt(6.0) / 24.0, 1e-16);
  EXPECT_DOUBLE_EQ(stability_c(1.0, 4), 0.25);
}

}  // namespace
}  // namespace fedsim::objectives
