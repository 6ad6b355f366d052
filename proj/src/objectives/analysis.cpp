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

#include "fedsim/objectives/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fedsim/core/error.hpp"
#include "fedsim/core/rng.hpp"

namespace fedsim::objectives {

double finite_diff_check(const Task& task, std::span<const double> w,
                         double eps) {
  task.check_dim(w);
  const int d = task.dim();
  std::vector<double> analytic(d);
  task.global_grad(w, analytic);
  std::vector<double> probe(w.begin(), w.end());
  double worst = 0.0;
  for (int j = 0; j < d; ++j) {
    const double orig = probe[j];
    probe[j] = orig + eps;
    const double up = task.global_loss(probe);
    probe[j] = orig - eps;
    const double down = task.global_loss(probe);
    probe[j] = orig;
    const double numeric = (up - down) / (2.0 * eps);
    const double rel =
        std::abs(numeric - analytic[j]) / std::max(std::abs(analytic[j]), 1e-8);
    worst = std::max(worst, rel);
  }
  return worst;
}

TheoryConstants fit_constants(const Task& task, const ProbeOptions& opts) {
  if (opts.probe_budget < 2) throw InvalidArgument("probe_budget too small");
  const int d = task.dim();
  const int c = task.client_count();
  const ParamVec centre =
      task.optimum() ? *task.optimum() : task.initial_point(opts.seed);
  Stream rng(opts.seed, Domain::kProbe);

  std::vector<ParamVec> probes(opts.probe_budget, centre);
  for (auto& p : probes) {
    for (int j = 0; j < d; ++j) p[j] += opts.radius * rng.normal();
  }
  bool distinct = false;
  for (const auto& p : probes) distinct = distinct || !(p == probes.front());
  if (!distinct) throw InvalidArgument("probe degenerate: all probe points identical");

  TheoryConstants out;
  out.source = TheoryConstants::Source::kEmpirical;

  std::vector<double> gi(d), gj(d), gf(d);
  // Regression data for G^2 + B^2 x.
  std::vector<double> xs, ys;
  xs.reserve(probes.size());
  ys.reserve(probes.size());
  for (const auto& p : probes) {
    task.global_grad(p, gf);
    double mean_sq = 0.0;
    for (int i = 0; i < c; ++i) {
      task.client_grad(i, p, gi);
      mean_sq += squared_norm(gi);
    }
    xs.push_back(squared_norm(gf));
    ys.push_back(mean_sq / c);
    out.L_G = std::max(out.L_G, std::sqrt(xs.back()));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
  }
  const double b2 = sxx > 0.0 ? sxy / sxx : 0.0;
  const double g2 = my - b2 * mx;
  out.B = std::sqrt(std::max(b2, 0.0));
  out.G = std::sqrt(std::max(g2, 0.0));

  // Local smoothness from nearby pairs.
  const double step = 0.1 * opts.radius;
  ParamVec q(d);
  for (const auto& p : probes) {
    const int i = static_cast<int>(rng.below(c));
    for (int j = 0; j < d; ++j) q[j] = p[j] + step * rng.normal();
    const double dist = std::sqrt(squared_distance(p, q));
    if (dist == 0.0) continue;
    task.client_grad(i, p, gi);
    task.client_grad(i, q, gj);
    out.L = std::max(out.L, std::sqrt(squared_distance(gi, gj)) / dist);
  }

  // Batch-gradient variance at a handful of probes.
  const int var_points = std::min<int>(10, static_cast<int>(probes.size()));
  const int draws = std::max(10, opts.probe_budget / var_points);
  double worst_var = 0.0;
  for (int k = 0; k < var_points; ++k) {
    const int i = static_cast<int>(rng.below(c));
    task.client_grad(i, probes[k], gf);
    double acc = 0.0;
    for (int s = 0; s < draws; ++s) {
      Stream draw(opts.seed, Domain::kProbe, static_cast<std::uint32_t>(k),
                  static_cast<std::uint32_t>(s), 1);
      task.stochastic_grad(i, probes[k], opts.batch_size, draw, gi);
      acc += squared_distance(gi, gf);
    }
    worst_var = std::max(worst_var, acc / draws);
  }
  out.sigma_l = std::sqrt(worst_var);
  return out;
}

TheoryConstants estimate_constants(const Task& task, int probe_budget,
                                   std::uint64_t seed) {
  if (probe_budget < 100) throw InvalidArgument("probe_budget must be >= 100");
  ProbeOptions opts;
  opts.probe_budget = probe_budget;
  opts.seed = seed;
  if (const auto& analytic = task.analytic_constants()) {
    // Only L_G needs probing; keep the budget small.
    opts.probe_budget = std::min(probe_budget, 100);
    const ParamVec centre = *task.optimum();
    Stream rng(seed, Domain::kProbe);
    TheoryConstants c = *analytic;
    std::vector<double> g(task.dim());
    ParamVec p(task.dim());
    for (int k = 0; k < opts.probe_budget; ++k) {
      for (int j = 0; j < task.dim(); ++j) p[j] = centre[j] + rng.normal();
      task.global_grad(p, g);
      c.L_G = std::max(c.L_G, norm(g));
    }
    return c;
  }
  return fit_constants(task, opts);
}

OracleResult centralized_oracle(Task& task, int steps, double lr,
                                std::uint64_t seed) {
  if (!(lr > 0.0)) throw InvalidArgument("oracle lr must be > 0");
  const int d = task.dim();
  ParamVec x = task.initial_point(seed);
  {
    Stream rng(seed, Domain::kOracle);
    for (int j = 0; j < d; ++j) x[j] += 0.1 * rng.normal();
  }
  ParamVec y = x, x_new(d);
  std::vector<double> g(d), gx(d);
  double inv_step = 1.0 / lr;
  double momentum_t = 1.0;
  OracleResult r;
  for (int it = 0; it < steps; ++it) {
    task.global_grad(x, gx);
    r.grad_norm = norm(gx);
    r.iterations = it;
    if (r.grad_norm <= kOracleTolerance) {
      r.converged = true;
      break;
    }
    const double fy = task.global_loss(y);
    task.global_grad(y, g);
    const double gg = squared_norm(g);
    for (int bt = 0; bt < 60; ++bt) {
      for (int j = 0; j < d; ++j) x_new[j] = y[j] - g[j] / inv_step;
      if (task.global_loss(x_new) <= fy - 0.5 * gg / inv_step) break;
      inv_step *= 2.0;
    }
    double restart_test = 0.0;
    for (int j = 0; j < d; ++j) restart_test += g[j] * (x_new[j] - x[j]);
    if (restart_test > 0.0) {
      momentum_t = 1.0;
      y = x_new;
    } else {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum_t * momentum_t));
      const double m = (momentum_t - 1.0) / t_next;
      for (int j = 0; j < d; ++j) y[j] = x_new[j] + m * (x_new[j] - x[j]);
      momentum_t = t_next;
    }
    x = x_new;
    inv_step *= 0.95;
    if (!all_finite(x)) break;
  }
  if (!r.converged) {
    task.global_grad(x, gx);
    r.grad_norm = norm(gx);
    r.converged = r.grad_norm <= kOracleTolerance;
    r.iterations = steps;
  }
  r.point = x;
  task.cache_oracle_optimum(x);
  return r;
}

}  // namespace fedsim::objectives
