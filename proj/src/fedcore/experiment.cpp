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

#include "fedsim/fedcore/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fedsim/core/error.hpp"
#include "fedsim/core/rng.hpp"
#include "fedsim/metrics/kernels.hpp"
#include "fedsim/objectives/analysis.hpp"
#include "fedsim/objectives/constants.hpp"
#include "fedsim/objectives/dataset_task.hpp"

namespace fedsim::fed {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double eta_bound(int clients, int participating, int local_steps, double L) {
  const double n = participating, c = clients, k = local_steps;
  return std::min(n / (2.0 * c * k * L), 1.0 / (n * k * L));
}

std::vector<std::string> validate_run(const RunSpec& spec,
                                      const objectives::Task& task,
                                      const Guards& guards) {
  std::vector<std::string> problems;
  const int c = task.client_count();
  if (spec.participating < 1 || spec.participating > c) {
    problems.push_back("participating clients must satisfy 1 <= N <= C (N=" +
                       std::to_string(spec.participating) +
                       ", C=" + std::to_string(c) + ")");
  }
  if (spec.local_steps < 1) problems.push_back("local_steps must be >= 1");
  if (spec.rounds < 0) problems.push_back("rounds must be >= 0");
  if (spec.batch_size < 1) problems.push_back("batch_size must be >= 1");
  const double beta = spec.algorithm.beta;
  if (!std::isfinite(beta)) {
    problems.push_back("beta must be finite");
  } else if (std::abs(beta) >= kBetaSafetyBound && !guards.allow_unsafe_beta) {
    problems.push_back("|beta| = " + fmt_double(std::abs(beta)) +
                       " violates |beta| < sqrt(6)/24 ~ 0.10206; set "
                       "allow_unsafe_beta to run anyway");
  }
  if (spec.algorithm.strategy == Strategy::kFedAdam &&
      !(spec.algorithm.params.adam_eps > 0.0)) {
    problems.push_back("adam_eps must be > 0");
  }
  if (spec.algorithm.strategy == Strategy::kFedDyn &&
      !(spec.algorithm.params.dyn_alpha > 0.0)) {
    problems.push_back("dyn_alpha must be > 0");
  }
  double eta_max = 0.0;
  bool eta_ok = true;
  for (int t = 0; t < spec.rounds; ++t) {
    const double eta = spec.schedule.at(t);
    if (!std::isfinite(eta) || eta <= 0.0) {
      problems.push_back("learning rate at round " + std::to_string(t) +
                         " is not a positive finite number");
      eta_ok = false;
      break;
    }
    eta_max = std::max(eta_max, eta);
  }
  if (eta_ok && spec.rounds > 0 && !guards.allow_unsafe_eta &&
      problems.empty()) {
    double L = guards.smoothness
                   ? *guards.smoothness
                   : objectives::estimate_constants(task, 100, spec.seed).L;
    const double bound = eta_bound(c, spec.participating, spec.local_steps, L);
    if (eta_max > bound) {
      problems.push_back("learning rate " + fmt_double(eta_max) +
                         " exceeds min{N/(2CKL), 1/(NKL)} = " +
                         fmt_double(bound) + " (L=" + fmt_double(L) +
                         "); set allow_unsafe_eta to run anyway");
    }
  }
  return problems;
}

RunLog run_experiment(const RunSpec& spec, const objectives::Task& task,
                      const EvalOptions& opts) {
  return run_experiment_from(
      spec, task, task.initial_point(hash_combine(spec.seed, 0x1417)), opts);
}

RunLog run_experiment_from(const RunSpec& spec, const objectives::Task& task,
                           const ParamVec& w0, const EvalOptions& opts) {
  auto problems = validate_run(spec, task, opts.guards);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  task.check_dim(w0);
  if (opts.record_every < 1) throw ConfigError({"record_every must be >= 1"});

  const auto* dataset = dynamic_cast<const objectives::DatasetTask*>(&task);
  std::optional<double> f_star;
  if (task.optimum()) f_star = task.global_loss(*task.optimum());
  const double floor = (task.optimum() && task.optimum_is_exact()) ? *f_star : 0.0;

  RunLog log;
  log.initial_point = w0;
  FedState state = make_initial_state(w0, task.client_count(), spec.algorithm.strategy);
  const StrategyCost cost = strategy_cost(spec.algorithm.strategy);
  log.accounting.stored_per_client = cost.stored_per_client;
  log.accounting.participating = spec.participating;
  log.accounting.local_steps = spec.local_steps;
  log.accounting.dim = task.dim();

  double initial_gap = 0.0;
  long long comm = 0, grads = 0;

  // Returns false if the state is diverged.
  auto record = [&](int t, bool force) -> bool {
    if (!all_finite(state.w_global)) return false;
    const bool want = force || t % opts.record_every == 0;
    if (!want) return true;
    auto obj = metrics::evaluate_objective(task, state.w_global, spec.execution);
    if (!std::isfinite(obj.loss) || !std::isfinite(obj.grad_norm_sq)) return false;
    if (t == 0) initial_gap = std::max(obj.loss - floor, 1e-12);
    log.max_loss = t == 0 ? obj.loss : std::max(log.max_loss, obj.loss);
    const bool blown = obj.loss - floor > opts.blowup_factor * initial_gap;
    metrics::RoundRecord r;
    r.t = t;
    r.eta = spec.schedule.at(t);
    r.train_loss = obj.loss;
    r.grad_norm_sq = obj.grad_norm_sq;
    r.divergence = metrics::divergence(state, spec.execution);
    if (f_star) r.opt_error = obj.loss - *f_star;
    if (dataset && opts.test_metrics) {
      r.test_loss = dataset->mean_loss(state.w_global, dataset->heldout());
      r.test_metric = dataset->accuracy(state.w_global, dataset->heldout());
    }
    double age_sum = 0.0;
    int age_max = 0;
    for (const auto& m : state.clients) {
      const int age = m.last_round < 0 ? t : t - 1 - m.last_round;
      age_sum += age;
      age_max = std::max(age_max, age);
    }
    r.staleness_mean = age_sum / state.client_count();
    r.staleness_max = age_max;
    r.comm_vectors = comm;
    r.grad_evals = grads;
    log.records.push_back(r);
    return !blown;
  };

  if (opts.observer) opts.observer(state);
  bool ok = record(0, true);
  int t = 0;
  while (ok && t < spec.rounds) {
    RoundOutcome out = run_round(spec, task, state);
    if (out.diverged) {
      ok = false;
      break;
    }
    comm += out.comm_vectors;
    grads += out.grad_evals;
    ++t;
    if (opts.observer) opts.observer(state);
    ok = record(t, t == spec.rounds);
  }
  if (!ok) {
    log.status = RunStatus::kDiverged;
    log.diverged_round = t;
  }
  log.accounting.comm_vectors = comm;
  log.accounting.grad_evals = grads;
  log.accounting.rounds = t;
  log.final_state = std::move(state);
  return log;
}

}  // namespace fedsim::fed
