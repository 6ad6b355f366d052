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
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fedsim/core/param_vec.hpp"
#include "fedsim/core/rng.hpp"
#include "fedsim/objectives/constants.hpp"

namespace fedsim::objectives {

enum class TaskKind { kQuadratic, kLogistic, kMlp };

std::string_view to_string(TaskKind kind);
TaskKind parse_task_kind(std::string_view name);

// A minibatch drawn on one client. `indices` are positions in the client's
// local multiset; `noise` is the additive gradient perturbation used by the
// quadratic family (empty elsewhere).
struct Batch {
  int client = 0;
  std::vector<int> indices;
  std::vector<double> noise;
};

// Client-indexed objective family: f(w) = (1/C) sum_i f_i(w).
class Task {
 public:
  virtual ~Task() = default;

  virtual TaskKind kind() const = 0;
  int dim() const { return dim_; }
  int client_count() const { return clients_; }

  // f_i(w) on the full local dataset.
  virtual double client_loss(int client, std::span<const double> w) const = 0;
  virtual void client_grad(int client, std::span<const double> w,
                           std::span<double> out) const = 0;
  // Loss and gradient together; data-driven tasks do it in one pass.
  virtual double client_loss_grad(int client, std::span<const double> w,
                                  std::span<double> out) const;

  // Mean loss / gradient on a minibatch.
  virtual double batch_loss(const Batch& batch,
                            std::span<const double> w) const = 0;
  virtual void batch_grad(const Batch& batch, std::span<const double> w,
                          std::span<double> out) const = 0;

  virtual Batch draw_batch(int client, int batch_size, Stream& rng) const = 0;
  // Samples of the client exactly once each (deterministic, noise-free).
  virtual Batch full_batch(int client) const = 0;

  virtual ParamVec initial_point(std::uint64_t seed) const;
  virtual std::unique_ptr<Task> clone() const = 0;

  // f and its gradient, summed over clients in index order.
  double global_loss(std::span<const double> w) const;
  void global_grad(std::span<const double> w, std::span<double> out) const;

  void stochastic_grad(int client, std::span<const double> w, int batch_size,
                       Stream& rng, std::span<double> out) const;

  const std::optional<ParamVec>& optimum() const { return optimum_; }
  bool optimum_is_exact() const { return optimum_exact_; }
  void cache_oracle_optimum(ParamVec w);

  const std::optional<TheoryConstants>& analytic_constants() const {
    return analytic_;
  }

  void check_client(int client) const;
  void check_dim(std::span<const double> w) const;

 protected:
  Task(int dim, int clients);

  void set_exact_optimum(ParamVec w);
  void set_analytic_constants(TheoryConstants c) { analytic_ = c; }

 private:
  int dim_;
  int clients_;
  std::optional<ParamVec> optimum_;
  bool optimum_exact_ = false;
  std::optional<TheoryConstants> analytic_;
};

inline constexpr int kAllClients = -1;

// f_i(w) on the full local set, or f(w) for kAllClients.
double loss(const Task& task, int client, std::span<const double> w);
double loss(const Task& task, const Batch& batch, std::span<const double> w);

ParamVec stochastic_grad(const Task& task, int client,
                         std::span<const double> w, int batch_size,
                         Stream& rng);
ParamVec full_grad(const Task& task, int client, std::span<const double> w);

}  // namespace fedsim::objectives
