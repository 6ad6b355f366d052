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

#include "fedsim/fedcore/round.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "fedsim/core/error.hpp"
#include "fedsim/core/rng.hpp"

namespace fedsim::fed {

ParamVec relaxed_init(const ParamVec& w_global, const ParamVec& w_last_local,
                      double beta) {
  require_same_dim(w_global.size(), w_last_local.size(), "relaxed_init");
  if (!std::isfinite(beta)) throw InvalidArgument("relaxed_init: non-finite beta");
  ParamVec out(w_global.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = w_global[j] + beta * (w_global[j] - w_last_local[j]);
  }
  if (!all_finite(out)) throw NumericError("relaxed_init: non-finite result");
  return out;
}

std::vector<int> select_clients(int clients, int participating, int round,
                                std::uint64_t seed) {
  if (participating < 1) throw InvalidArgument("select_clients: N must be >= 1");
  if (participating > clients) {
    throw InvalidArgument("select_clients: N must be <= C");
  }
  std::vector<int> ids(clients);
  std::iota(ids.begin(), ids.end(), 0);
  if (participating < clients) {
    Stream rng(seed, Domain::kSelection, 0, static_cast<std::uint32_t>(round));
    for (int k = 0; k < participating; ++k) {
      const auto j = k + static_cast<int>(rng.below(clients - k));
      std::swap(ids[k], ids[j]);
    }
    ids.resize(participating);
    std::sort(ids.begin(), ids.end());
  }
  return ids;
}

LocalResult local_train(const AlgorithmSpec& spec, const objectives::Task& task,
                        int client, const ParamVec& w_init,
                        const LocalContext& ctx) {
  if (ctx.local_steps < 1) throw InvalidArgument("local_train: K must be >= 1");
  const int d = task.dim();
  require_same_dim(w_init.size(), d, "local_train");
  const StrategyParams& p = spec.params;
  const double eta = ctx.eta;

  LocalResult r;
  r.w_final = w_init;
  ParamVec& w = r.w_final;
  std::vector<double> g(d), g_adv(d), w_adv(d);

  std::vector<double> correction;
  if (spec.strategy == Strategy::kScaffold) {
    correction.resize(d);
    for (int j = 0; j < d; ++j) {
      correction[j] = (*ctx.server_control)[j] - (*ctx.client_control)[j];
    }
  }

  for (int k = 0; k < ctx.local_steps; ++k) {
    Stream rng(ctx.seed, Domain::kLocalStep, static_cast<std::uint32_t>(client),
               static_cast<std::uint32_t>(ctx.round), static_cast<std::uint32_t>(k));
    const objectives::Batch batch = task.draw_batch(client, ctx.batch_size, rng);
    task.batch_grad(batch, w, g);
    ++r.grad_evals;

    switch (spec.strategy) {
      case Strategy::kFedAvg:
      case Strategy::kFedAdam:
        for (int j = 0; j < d; ++j) w[j] -= eta * g[j];
        break;
      case Strategy::kScaffold:
        // y <- y - eta (g - c_i + c)
        for (int j = 0; j < d; ++j) w[j] -= eta * (g[j] + correction[j]);
        break;
      case Strategy::kFedCm: {
        const ParamVec& m = *ctx.momentum;
        for (int j = 0; j < d; ++j) {
          w[j] -= eta * (p.cm_alpha * g[j] + (1.0 - p.cm_alpha) * m[j]);
        }
        break;
      }
      case Strategy::kFedSam: {
        // Ascend to w + rho g/||g||, then descend with the gradient there
        // on the same minibatch.
        const double gn = norm(g);
        if (gn > 0.0) {
          for (int j = 0; j < d; ++j) w_adv[j] = w[j] + p.sam_rho * g[j] / gn;
          task.batch_grad(batch, w_adv, g_adv);
          ++r.grad_evals;
          for (int j = 0; j < d; ++j) w[j] -= eta * g_adv[j];
        } else {
          for (int j = 0; j < d; ++j) w[j] -= eta * g[j];
        }
        break;
      }
      case Strategy::kFedDyn: {
        // grad of f_i(w) - <lambda_i, w> + alpha/2 ||w - w^t||^2
        const ParamVec& lambda = *ctx.dual;
        const ParamVec& centre = *ctx.w_global;
        for (int j = 0; j < d; ++j) {
          w[j] -= eta * (g[j] - lambda[j] + p.dyn_alpha * (w[j] - centre[j]));
        }
        break;
      }
    }
    if (!all_finite(w)) {
      r.diverged = true;
      return r;
    }
  }

  if (spec.strategy == Strategy::kScaffold) {
    // Option II: c_i+ = c_i - c + (x - y) / (K eta), x the local start.
    r.new_control = ParamVec(d);
    const double inv = 1.0 / (ctx.local_steps * eta);
    for (int j = 0; j < d; ++j) {
      r.new_control[j] = -correction[j] + (w_init[j] - w[j]) * inv;
    }
  } else if (spec.strategy == Strategy::kFedDyn) {
    const ParamVec& lambda = *ctx.dual;
    const ParamVec& centre = *ctx.w_global;
    r.new_dual = ParamVec(d);
    for (int j = 0; j < d; ++j) {
      r.new_dual[j] = lambda[j] - p.dyn_alpha * (w[j] - centre[j]);
    }
  }
  return r;
}

namespace {

void pairwise_sum(std::span<const ParamVec> v, std::vector<double>& out) {
  const std::size_t d = v.front().size();
  if (v.size() == 1) {
    out.assign(v.front().begin(), v.front().end());
    return;
  }
  const std::size_t mid = v.size() / 2;
  std::vector<double> right(d);
  pairwise_sum(v.first(mid), out);
  pairwise_sum(v.subspan(mid), right);
  for (std::size_t j = 0; j < d; ++j) out[j] += right[j];
}

}  // namespace

ParamVec aggregate(std::span<const ParamVec> locals) {
  if (locals.empty()) throw InvalidArgument("aggregate: empty list");
  const std::size_t d = locals.front().size();
  for (const auto& v : locals) require_same_dim(v.size(), d, "aggregate");
  std::vector<double> sum(d);
  pairwise_sum(locals, sum);
  const double n = static_cast<double>(locals.size());
  for (double& s : sum) s /= n;
  return ParamVec(std::move(sum));
}

ParamVec server_update(const AlgorithmSpec& spec, const ParamVec& w_old,
                       const ParamVec& w_aggregated, FedState& state) {
  require_same_dim(w_old.size(), w_aggregated.size(), "server_update");
  const std::size_t d = w_old.size();
  const StrategyParams& p = spec.params;
  switch (spec.strategy) {
    case Strategy::kFedAdam: {
      auto& s = state.server;
      if (s.adam_m.size() != d) {
        s.adam_m = ParamVec(d);
        s.adam_v = ParamVec(d);
        s.adam_steps = 0;
      }
      ++s.adam_steps;
      const double c1 = 1.0 - std::pow(p.adam_beta1, s.adam_steps);
      const double c2 = 1.0 - std::pow(p.adam_beta2, s.adam_steps);
      ParamVec out(d);
      for (std::size_t j = 0; j < d; ++j) {
        const double delta = w_aggregated[j] - w_old[j];
        s.adam_m[j] = p.adam_beta1 * s.adam_m[j] + (1.0 - p.adam_beta1) * delta;
        s.adam_v[j] = p.adam_beta2 * s.adam_v[j] + (1.0 - p.adam_beta2) * delta * delta;
        const double m_hat = s.adam_m[j] / c1;
        const double v_hat = s.adam_v[j] / c2;
        out[j] = w_old[j] + p.adam_lr * m_hat / (std::sqrt(v_hat) + p.adam_eps);
      }
      return out;
    }
    case Strategy::kFedDyn: {
      // w = mean(w_i) - (1/alpha) h, h the mean of every client's dual.
      ParamVec h(d);
      for (const auto& c : state.clients) {
        for (std::size_t j = 0; j < d; ++j) h[j] += c.dual[j];
      }
      const double scale = 1.0 / (p.dyn_alpha * state.clients.size());
      ParamVec out = w_aggregated;
      for (std::size_t j = 0; j < d; ++j) out[j] -= scale * h[j];
      return out;
    }
    default:
      if (p.global_lr == 1.0) return w_aggregated;
      {
        ParamVec out = w_old;
        for (std::size_t j = 0; j < d; ++j) {
          out[j] += p.global_lr * (w_aggregated[j] - w_old[j]);
        }
        return out;
      }
  }
}

RoundOutcome run_round(const RunSpec& spec, const objectives::Task& task,
                       FedState& state) {
  const int d = task.dim();
  const int clients = task.client_count();
  require_same_dim(state.w_global.size(), d, "run_round");
  if (state.client_count() != clients) {
    throw InvalidArgument("run_round: state/task client count mismatch");
  }
  const AlgorithmSpec& algo = spec.algorithm;
  const int t = state.round;
  const double eta = spec.schedule.at(t);

  RoundOutcome out;
  out.selected = select_clients(clients, spec.participating, t, spec.seed);
  const int n = static_cast<int>(out.selected.size());

  ParamVec momentum;
  if (algo.strategy == Strategy::kFedCm) {
    momentum = ParamVec(d);
    if (state.server.has_prev) {
      const double inv = 1.0 / (state.server.prev_eta * spec.local_steps);
      for (int j = 0; j < d; ++j) {
        momentum[j] = (state.server.prev_global[j] - state.w_global[j]) * inv;
      }
    }
  }

  std::vector<LocalResult> results(n);
  std::exception_ptr failure;
  auto train_one = [&](int s) {
    const int i = out.selected[s];
    const ClientMemory& mem = state.clients[i];
    LocalContext ctx;
    ctx.round = t;
    ctx.eta = eta;
    ctx.local_steps = spec.local_steps;
    ctx.batch_size = spec.batch_size;
    ctx.seed = spec.seed;
    ctx.w_global = &state.w_global;
    ctx.server_control = &state.server.scaffold_c;
    ctx.client_control = &mem.control;
    ctx.dual = &mem.dual;
    ctx.momentum = &momentum;
    try {
      const ParamVec start = algo.relaxed
          ? relaxed_init(state.w_global, mem.last_local_end, algo.beta)
          : state.w_global;
      results[s] = local_train(algo, task, i, start, ctx);
    } catch (const NumericError&) {
      results[s].diverged = true;
    }
  };

  if (spec.execution == Execution::kParallel) {
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < n; ++s) {
      try {
        train_one(s);
      } catch (...) {
#pragma omp critical(fedsim_round_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (int s = 0; s < n; ++s) train_one(s);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : results) {
    out.grad_evals += r.grad_evals;
    out.diverged = out.diverged || r.diverged;
  }
  out.comm_vectors = static_cast<long long>(n) * strategy_cost(algo.strategy).comm_per_client;
  if (out.diverged) return out;

  std::vector<ParamVec> locals;
  locals.reserve(n);
  for (const auto& r : results) locals.push_back(r.w_final);
  const ParamVec w_agg = aggregate(locals);

  if (algo.strategy == Strategy::kScaffold) {
    // c <- c + (1/C) sum_{i in S} (c_i+ - c_i)
    ParamVec& c = state.server.scaffold_c;
    for (int s = 0; s < n; ++s) {
      const ParamVec& old_c = state.clients[out.selected[s]].control;
      for (int j = 0; j < d; ++j) {
        c[j] += (results[s].new_control[j] - old_c[j]) / clients;
      }
    }
  }
  for (int s = 0; s < n; ++s) {
    ClientMemory& mem = state.clients[out.selected[s]];
    mem.last_local_end = std::move(results[s].w_final);
    mem.last_round = t;
    if (algo.strategy == Strategy::kScaffold) mem.control = std::move(results[s].new_control);
    if (algo.strategy == Strategy::kFedDyn) mem.dual = std::move(results[s].new_dual);
  }

  ParamVec w_new = server_update(algo, state.w_global, w_agg, state);
  if (algo.strategy == Strategy::kFedCm) {
    state.server.prev_global = state.w_global;
    state.server.prev_eta = eta;
    state.server.has_prev = true;
  }
  state.w_global = std::move(w_new);
  state.round = t + 1;
  if (!all_finite(state.w_global)) out.diverged = true;
  return out;
}

}  // namespace fedsim::fed
