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

#include "fedsim/metrics/measures.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>

#include "fedsim/core/error.hpp"
#include "fedsim/core/rng.hpp"

namespace fedsim::metrics {

double optimization_error(const objectives::Task& task,
                          std::span<const double> w) {
  if (!task.optimum()) throw MissingOptimum();
  return task.global_loss(w) - task.global_loss(*task.optimum());
}

double generalization_gap(const objectives::DatasetTask& task,
                          std::span<const double> w,
                          const objectives::SampleStore& heldout) {
  if (heldout.size() == 0) throw InvalidArgument("generalization_gap: empty heldout set");
  return task.mean_loss(w, heldout) - task.global_loss(w);
}

double loglog_slope(std::span<const std::pair<double, double>> series,
                    int begin, int end) {
  const int n_all = static_cast<int>(series.size());
  if (end < 0) end = n_all;
  if (begin < 0 || begin > end || end > n_all) {
    throw InvalidArgument("loglog_slope: bad window");
  }
  const int n = end - begin;
  if (n < 5) throw InvalidArgument("loglog_slope: need at least 5 points");
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    const auto [x, y] = series[begin + i];
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw InvalidArgument("loglog_slope: non-positive value in window");
    }
    lx[i] = std::log(x);
    ly[i] = std::log(y);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("loglog_slope: x values are all equal");
  return sxy / sxx;
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("spearman: need two equal-length series of >= 2");
  }
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

ExcessRiskReport excess_risk_report(const fed::RunLog& log,
                                    const objectives::Task& task) {
  if (log.records.empty()) throw InvalidArgument("excess_risk_report: empty run log");
  const ParamVec& w = log.final_state.w_global;
  ExcessRiskReport r;
  r.optimization = optimization_error(task, w);
  if (const auto* ds = dynamic_cast<const objectives::DatasetTask*>(&task)) {
    r.generalization = generalization_gap(*ds, w, ds->heldout());
  }
  r.excess = r.generalization + r.optimization;
  r.max_loss = log.max_loss;
  const auto& recs = log.records;
  r.divergence.final = recs.back().divergence;
  const std::size_t half = recs.size() / 2;
  double tail = 0.0;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    r.divergence.max = std::max(r.divergence.max, recs[i].divergence);
    if (i >= half) tail += recs[i].divergence;
  }
  r.divergence.tail_mean = tail / static_cast<double>(recs.size() - half);
  return r;
}

int dataset_difference(const objectives::DatasetTask& a,
                       const objectives::DatasetTask& b) {
  if (a.client_count() != b.client_count() || a.features() != b.features()) {
    throw InvalidArgument("datasets have different layouts");
  }
  int diff = 0;
  const int p = a.features();
  for (int i = 0; i < a.client_count(); ++i) {
    const auto& sa = a.client_samples(i);
    const auto& sb = b.client_samples(i);
    if (sa.size() != sb.size()) throw InvalidArgument("datasets have different layouts");
    for (std::size_t j = 0; j < sa.size(); ++j) {
      const double* xa = a.pool().row(sa[j]);
      const double* xb = b.pool().row(sb[j]);
      bool same = a.pool().y[sa[j]] == b.pool().y[sb[j]];
      for (int k = 0; same && k < p; ++k) same = xa[k] == xb[k];
      diff += !same;
    }
  }
  return diff;
}

StabilityResult stability_probe(const fed::RunSpec& spec,
                                const objectives::DatasetTask& task,
                                const objectives::DatasetTask& neighbour,
                                const StabilityOptions& opts,
                                const fed::Guards& guards) {
  if (spec.schedule.kind != fed::Schedule::Kind::kInverseT) {
    throw ConfigError({"stability probe requires schedule kind inverse_t"});
  }
  if (dataset_difference(task, neighbour) > 1) {
    throw InvalidArgument("stability probe: datasets are not neighbouring");
  }
  if (opts.probe_points < 1) throw InvalidArgument("probe_points must be >= 1");
  std::vector<int> cps = opts.checkpoints;
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.empty() || cps.front() < 0 || cps.back() > spec.rounds) {
    throw InvalidArgument("stability checkpoints must lie in [0, T]");
  }

  const ParamVec w0 = task.initial_point(hash_combine(spec.seed, 0x1417));
  fed::EvalOptions eval;
  eval.record_every = std::max(1, spec.rounds);
  eval.test_metrics = false;
  eval.guards = guards;

  std::vector<ParamVec> snaps[2];
  const objectives::DatasetTask* tasks[2] = {&task, &neighbour};
  fed::RunStatus status[2] = {fed::RunStatus::kOk, fed::RunStatus::kOk};
  std::exception_ptr failure;
  fed::RunSpec inner = spec;
  inner.execution = Execution::kSerial;

#pragma omp parallel for num_threads(2) schedule(static)
  for (int side = 0; side < 2; ++side) {
    try {
      fed::EvalOptions e = eval;
      e.observer = [&, side](const fed::FedState& s) {
        if (std::binary_search(cps.begin(), cps.end(), s.round)) {
          snaps[side].push_back(s.w_global);
        }
      };
      status[side] = fed::run_experiment_from(inner, *tasks[side], w0, e).status;
    } catch (...) {
#pragma omp critical(fedsim_stability_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  if (status[0] != fed::RunStatus::kOk || status[1] != fed::RunStatus::kOk ||
      snaps[0].size() != cps.size() || snaps[1].size() != cps.size()) {
    throw NumericError("stability probe: a paired run diverged");
  }

  const objectives::SampleStore fresh =
      task.generator().sample(opts.probe_points, opts.probe_seed, false);
  StabilityResult out;
  out.checkpoints = cps;
  for (std::size_t c = 0; c < cps.size(); ++c) {
    double s = 0.0;
    for (int z = 0; z < fresh.size(); ++z) {
      s += std::abs(task.sample_loss(snaps[0][c], fresh.row(z), fresh.y[z]) -
                    task.sample_loss(snaps[1][c], fresh.row(z), fresh.y[z]));
    }
    out.epsilon.push_back(s / fresh.size());
  }
  return out;
}

StabilityResult stability_probe(const fed::RunSpec& spec,
                                const objectives::DatasetTask& task,
                                int client, int position,
                                const StabilityOptions& opts,
                                const fed::Guards& guards) {
  const objectives::SampleStore z = task.generator().sample(
      1, hash_combine(opts.probe_seed, 0x5eed), false);
  auto neighbour = task.with_replaced_sample(
      client, position, std::span<const double>(z.row(0), z.features), z.y[0]);
  return stability_probe(spec, task, *neighbour, opts, guards);
}

}  // namespace fedsim::metrics
