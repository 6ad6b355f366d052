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
#include <vector>

#include "fedsim/objectives/task.hpp"

namespace fedsim::objectives {

struct QuadraticSpec {
  int dim = 10;
  int clients = 20;
  double hetero_scale = 0.5;
  double condition_number = 10.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

// f_i(w) = 1/2 w'Aw - b_i'w with one shared SPD matrix A. Stochastic
// gradients add isotropic Gaussian noise with per-coordinate std
// noise_sigma / sqrt(d), so E||g - grad f_i||^2 = noise_sigma^2 exactly.
class QuadraticTask final : public Task {
 public:
  // `hessian` is d x d row-major and must be symmetric positive definite;
  // `offsets` holds one b_i per client.
  QuadraticTask(std::vector<double> hessian, std::vector<ParamVec> offsets,
                double noise_sigma);

  TaskKind kind() const override { return TaskKind::kQuadratic; }

  double client_loss(int client, std::span<const double> w) const override;
  void client_grad(int client, std::span<const double> w,
                   std::span<double> out) const override;
  double batch_loss(const Batch& batch,
                    std::span<const double> w) const override;
  void batch_grad(const Batch& batch, std::span<const double> w,
                  std::span<double> out) const override;
  Batch draw_batch(int client, int batch_size, Stream& rng) const override;
  Batch full_batch(int client) const override;
  std::unique_ptr<Task> clone() const override;

  const std::vector<double>& hessian() const { return hessian_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const ParamVec& offset(int client) const { return offsets_[client]; }
  const ParamVec& mean_offset() const { return mean_offset_; }
  double noise_sigma() const { return noise_sigma_; }

  // Closed form f(w*) = -1/2 bbar' A^{-1} bbar.
  double optimal_value() const;

 private:
  friend std::unique_ptr<QuadraticTask> make_quadratic_family(
      const QuadraticSpec&);

  void hessian_times(std::span<const double> w, std::span<double> out) const;

  std::vector<double> hessian_;
  std::vector<double> eigenvalues_;
  std::vector<ParamVec> offsets_;
  ParamVec mean_offset_;
  double noise_sigma_;
};

// Eigenvalues of A are log-spaced in [1/condition_number, 1]; offsets are
// b_i = bbar + hetero_scale * u_i with zero-mean, equal-norm unit u_i, so
// G = max_i ||b_i - bbar|| = hetero_scale (whenever such a configuration
// exists; otherwise G is the measured maximum).
std::unique_ptr<QuadraticTask> make_quadratic_family(const QuadraticSpec& spec);

// Solves S x = r for symmetric positive-definite S (row-major).
std::vector<double> cholesky_solve(const std::vector<double>& s,
                                   std::span<const double> r);

}  // namespace fedsim::objectives
