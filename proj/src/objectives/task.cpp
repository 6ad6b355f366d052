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

#include "fedsim/objectives/task.hpp"

#include <cmath>
#include <string>

#include "fedsim/core/error.hpp"

namespace fedsim::objectives {

std::string_view to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::kQuadratic:
      return "quadratic";
    case TaskKind::kLogistic:
      return "logistic";
    case TaskKind::kMlp:
      return "mlp";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "quadratic") return TaskKind::kQuadratic;
  if (name == "logistic") return TaskKind::kLogistic;
  if (name == "mlp") return TaskKind::kMlp;
  throw InvalidArgument("unknown task kind '" + std::string(name) + "'");
}

Task::Task(int dim, int clients) : dim_(dim), clients_(clients) {
  if (dim < 1) throw InvalidArgument("task dimension must be >= 1");
  if (clients < 1) throw InvalidArgument("task needs at least one client");
}

ParamVec Task::initial_point(std::uint64_t) const { return ParamVec(dim_); }

double Task::client_loss_grad(int client, std::span<const double> w,
                              std::span<double> out) const {
  client_grad(client, w, out);
  return client_loss(client, w);
}

double Task::global_loss(std::span<const double> w) const {
  check_dim(w);
  double s = 0.0;
  for (int i = 0; i < clients_; ++i) s += client_loss(i, w);
  return s / clients_;
}

void Task::global_grad(std::span<const double> w, std::span<double> out) const {
  check_dim(w);
  require_same_dim(out.size(), static_cast<std::size_t>(dim_), "global_grad");
  std::vector<double> acc(dim_, 0.0);
  std::vector<double> g(dim_);
  for (int i = 0; i < clients_; ++i) {
    client_grad(i, w, g);
    for (int j = 0; j < dim_; ++j) acc[j] += g[j];
  }
  for (int j = 0; j < dim_; ++j) out[j] = acc[j] / clients_;
}

void Task::stochastic_grad(int client, std::span<const double> w,
                           int batch_size, Stream& rng,
                           std::span<double> out) const {
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (!all_finite(w)) throw NumericError("stochastic_grad: non-finite w");
  batch_grad(draw_batch(client, batch_size, rng), w, out);
}

void Task::cache_oracle_optimum(ParamVec w) {
  check_dim(w);
  if (optimum_exact_) return;
  optimum_ = std::move(w);
}

void Task::set_exact_optimum(ParamVec w) {
  optimum_ = std::move(w);
  optimum_exact_ = true;
}

void Task::check_client(int client) const {
  if (client < 0 || client >= clients_) {
    throw InvalidArgument("client id " + std::to_string(client) +
                          " out of range");
  }
}

void Task::check_dim(std::span<const double> w) const {
  require_same_dim(w.size(), static_cast<std::size_t>(dim_), "task");
}

double loss(const Task& task, int client, std::span<const double> w) {
  if (client == kAllClients) return task.global_loss(w);
  task.check_client(client);
  task.check_dim(w);
  return task.client_loss(client, w);
}

double loss(const Task& task, const Batch& batch, std::span<const double> w) {
  task.check_client(batch.client);
  task.check_dim(w);
  return task.batch_loss(batch, w);
}

ParamVec stochastic_grad(const Task& task, int client,
                         std::span<const double> w, int batch_size,
                         Stream& rng) {
  task.check_client(client);
  task.check_dim(w);
  ParamVec g(task.dim());
  task.stochastic_grad(client, w, batch_size, rng, g.span());
  return g;
}

ParamVec full_grad(const Task& task, int client, std::span<const double> w) {
  task.check_dim(w);
  ParamVec g(task.dim());
  if (client == kAllClients) {
    task.global_grad(w, g.span());
  } else {
    task.check_client(client);
    task.client_grad(client, w, g.span());
  }
  return g;
}

}  // namespace fedsim::objectives

namespace fedsim {

double kappa1(double beta) {
  const double b2 = beta * beta;
  return 1300.0 * b2 / (1.0 - 72.0 * b2) + 17.0;
}

double kappa2(double beta) {
  const double b2 = beta * beta;
  return 1020.0 * b2 / (1.0 - 72.0 * b2) + 13.0;
}

double stability_c(double mu0, int local_steps) {
  if (local_steps < 1) throw InvalidArgument("local_steps must be >= 1");
  return mu0 / local_steps;
}

}  // namespace fedsim
