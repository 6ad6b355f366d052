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

#include "fedsim/metrics/kernels.hpp"

#include <exception>
#include <vector>

#include "fedsim/core/error.hpp"
#include "fedsim/metrics/records.hpp"

namespace fedsim::metrics {

namespace {

template <typename Body>
void for_each_client(int n, Execution exec, Body&& body) {
  if (exec == Execution::kParallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical(fedsim_kernel_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int i = 0; i < n; ++i) body(i);
  }
}

}  // namespace

ObjectiveValue evaluate_objective(const objectives::Task& task,
                                  std::span<const double> w, Execution exec) {
  task.check_dim(w);
  const int c = task.client_count();
  const int d = task.dim();
  std::vector<double> losses(c);
  std::vector<double> grads(static_cast<std::size_t>(c) * d);
  for_each_client(c, exec, [&](int i) {
    losses[i] = task.client_loss_grad(
        i, w, std::span<double>(grads.data() + static_cast<std::size_t>(i) * d, d));
  });
  ObjectiveValue v;
  std::vector<double> g(d, 0.0);
  for (int i = 0; i < c; ++i) {
    v.loss += losses[i];
    const double* gi = grads.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) g[j] += gi[j];
  }
  v.loss /= c;
  for (double& x : g) x /= c;
  v.grad_norm_sq = squared_norm(g);
  return v;
}

double evaluate_loss(const objectives::Task& task, std::span<const double> w,
                     Execution exec) {
  task.check_dim(w);
  const int c = task.client_count();
  std::vector<double> losses(c);
  for_each_client(c, exec, [&](int i) { losses[i] = task.client_loss(i, w); });
  double s = 0.0;
  for (double l : losses) s += l;
  return s / c;
}

double divergence(const fed::FedState& state, Execution exec) {
  const int c = state.client_count();
  if (c < 1) throw InvalidArgument("divergence: state has no clients");
  std::vector<double> terms(c);
  for_each_client(c, exec, [&](int i) {
    terms[i] = squared_distance(state.clients[i].last_local_end, state.w_global);
  });
  double s = 0.0;
  for (double x : terms) s += x;
  return s / c;
}

double Accounting::comm_ratio() const {
  if (rounds == 0 || participating == 0) return 0.0;
  return static_cast<double>(comm_vectors) / (static_cast<double>(participating) * rounds);
}

double Accounting::grad_ratio() const {
  if (rounds == 0 || participating == 0 || local_steps == 0) return 0.0;
  return static_cast<double>(grad_evals) /
         (static_cast<double>(participating) * local_steps * rounds);
}

}  // namespace fedsim::metrics
