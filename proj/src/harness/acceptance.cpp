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

#include "fedsim/harness/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "fedsim/core/error.hpp"
#include "fedsim/core/rng.hpp"
#include "fedsim/fedcore/experiment.hpp"
#include "fedsim/fedcore/round.hpp"
#include "fedsim/harness/config.hpp"
#include "fedsim/harness/runner.hpp"
#include "fedsim/metrics/kernels.hpp"
#include "fedsim/metrics/measures.hpp"

namespace fedsim::harness {

namespace {

// ---------------------------------------------------------------------------
// Built-in configurations. Each also ships as configs/acceptance/<name>.conf.

constexpr std::string_view kExactReductionQuadratic = R"(# FedAvg and FedInit(beta=0) on a noisy quadratic under partial participation.
[objectives]
task = quadratic
clients = 20
dim = 10
hetero_scale = 1.0
noise_sigma = 0.5

[fedcore]
strategy = fedavg
participating = 5
rounds = 200
batch_size = 10

[harness]
seed = 11
allow_unsafe_eta = true
)";

constexpr std::string_view kExactReductionLogistic = R"(# FedAvg and FedInit(beta=0) on the Dr=0.1 logistic task.
[objectives]
task = logistic
clients = 100
oracle = off

[partition]
dirichlet = 0.1

[fedcore]
strategy = fedavg
participating = 10
rounds = 200

[metrics]
record_every = 50

[harness]
seed = 12
allow_unsafe_eta = true
)";

constexpr std::string_view kGradcheckQuadratic = R"([objectives]
task = quadratic
clients = 20
dim = 10

[fedcore]
strategy = fedavg

[metrics]
gradcheck_points = 20
gradcheck_eps = 1e-5

[harness]
seed = 21
)";

constexpr std::string_view kGradcheckLogistic = R"([objectives]
task = logistic
clients = 10
samples_per_client = 20

[fedcore]
strategy = fedavg

[metrics]
gradcheck_points = 20
gradcheck_eps = 1e-5

[harness]
seed = 22
)";

constexpr std::string_view kGradcheckMlp = R"([objectives]
task = mlp
clients = 10
samples_per_client = 20
hidden = 16

[fedcore]
strategy = fedavg

[metrics]
gradcheck_points = 20
gradcheck_eps = 1e-5

[harness]
seed = 23
)";

constexpr std::string_view kRatePl = R"(# Noise-dominated quadratic (PL), eta_t = c log(t+t0)/(t+t0).
[objectives]
task = quadratic
clients = 20
dim = 10
hetero_scale = 1.0
condition_number = 10
noise_sigma = 1.0

[fedcore]
strategy = fedinit
participating = 20
local_steps = 5
rounds = 2000
batch_size = 1
lr_schedule = log_over_t
lr_scale = 2.0
lr_offset = 3

[harness]
seed = 31
replicates = 10
allow_unsafe_eta = true
)";

constexpr std::string_view kRateRunningAverage = R"(# Same family, eta_t = c / sqrt(t+t0).
[objectives]
task = quadratic
clients = 20
dim = 10
hetero_scale = 1.0
condition_number = 10
noise_sigma = 1.0

[fedcore]
strategy = fedinit
participating = 20
local_steps = 5
rounds = 2000
batch_size = 1
lr_schedule = inverse_sqrt_t
lr_scale = 1.0
lr_offset = 3

[harness]
seed = 41
replicates = 10
allow_unsafe_eta = true
)";

constexpr std::string_view kBetaOrdering = R"(# Heterogeneous logistic, Dr=0.1, N/C = 10/100, K=5; sweep beta over -0.1, 0, 0.1.
# Strong regularization and a large local step make local training contract.
[objectives]
task = logistic
clients = 100
samples_per_client = 50
weight_decay = 0.1
oracle = off

[partition]
dirichlet = 0.1

[fedcore]
strategy = fedinit
participating = 10
local_steps = 5
rounds = 500
batch_size = 50
lr = 1.5

[metrics]
record_every = 500

[harness]
seed = 61
replicates = 20
allow_unsafe_eta = true
)";

constexpr std::string_view kExcessiveBeta = R"(# High-heterogeneity logistic task with beta above the safe bound.
[objectives]
task = logistic
clients = 100
oracle = off

[partition]
dirichlet = 0.1

[fedcore]
strategy = fedinit
beta = 0.15
participating = 10
local_steps = 5
rounds = 1000

[metrics]
record_every = 10
test_metrics = false

[harness]
seed = 71
allow_unsafe_beta = true
allow_unsafe_eta = true
)";

constexpr std::string_view kParticipationSpeedup = R"(# Noisy quadratic, constant step; sweep N over 5, 10, 20.
[objectives]
task = quadratic
clients = 20
dim = 10
hetero_scale = 1.0
noise_sigma = 1.0

[fedcore]
strategy = fedinit
participating = 10
local_steps = 5
rounds = 500
batch_size = 1
lr_schedule = constant
lr = 0.05

[metrics]
record_every = 5

[harness]
seed = 81
replicates = 10
allow_unsafe_eta = true
)";

constexpr std::string_view kLocalStepsTradeoff = R"(# Logistic task at fixed T; sweep K over 1, 5, 20, 80.
[objectives]
task = logistic
clients = 100
weight_decay = 0.03
oracle = off

[partition]
dirichlet = 0.1

[fedcore]
strategy = fedinit
participating = 10
local_steps = 5
rounds = 30
lr = 0.5

[metrics]
record_every = 30

[harness]
seed = 91
replicates = 10
allow_unsafe_eta = true
)";

constexpr std::string_view kStability = R"(# Paired neighbouring-dataset runs, eta_t = c/(t+t0); S is overridden to 200.
[objectives]
task = logistic
clients = 10
samples_per_client = 50
oracle = off

[partition]
dirichlet = 0.1

[fedcore]
strategy = fedinit
participating = 10
local_steps = 5
rounds = 200
batch_size = 50
lr_schedule = inverse_t
lr_scale = 0.2

[metrics]
stability_client = 0
stability_position = 0
stability_probe_points = 500
stability_checkpoints = 25,50,75,100,125,150,175,200

[harness]
seed = 101
replicates = 20
allow_unsafe_eta = true
)";

constexpr std::string_view kCostAccounting = R"([objectives]
task = quadratic
clients = 20
dim = 5

[fedcore]
strategy = fedavg
participating = 5
local_steps = 5
rounds = 4
batch_size = 5

[harness]
seed = 121
allow_unsafe_eta = true
)";

constexpr std::pair<std::string_view, std::string_view> kConfigs[] = {
    {"exact_reduction_quadratic", kExactReductionQuadratic},
    {"exact_reduction_logistic", kExactReductionLogistic},
    {"gradcheck_quadratic", kGradcheckQuadratic},
    {"gradcheck_logistic", kGradcheckLogistic},
    {"gradcheck_mlp", kGradcheckMlp},
    {"rate_pl", kRatePl},
    {"rate_running_average", kRateRunningAverage},
    {"beta_ordering", kBetaOrdering},
    {"excessive_beta", kExcessiveBeta},
    {"participation_speedup", kParticipationSpeedup},
    {"local_steps_tradeoff", kLocalStepsTradeoff},
    {"stability", kStability},
    {"cost_accounting", kCostAccounting},
};

// ---------------------------------------------------------------------------
// Helpers.

ConfigValues values(std::string_view name) {
  return read_config_text(acceptance_config(name), "acceptance/" + std::string(name));
}

ConfigValues set(ConfigValues v, std::initializer_list<std::pair<std::string, std::string>> kv) {
  for (const auto& [k, val] : kv) v = with_override(std::move(v), k, val);
  return v;
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

struct Trace {
  std::vector<ParamVec> globals;
  std::vector<ParamVec> last_local;
};

Trace trace(const ExperimentConfig& c) {
  const std::uint64_t seed = replicate_seed(c.seed, 0);
  auto task = make_task(c, seed);
  fed::RunSpec spec = c.run;
  spec.seed = seed;
  fed::EvalOptions e;
  e.record_every = std::max(1, c.run.rounds);
  e.test_metrics = false;
  e.guards = c.guards;
  Trace t;
  e.observer = [&](const fed::FedState& s) { t.globals.push_back(s.w_global); };
  auto log = fed::run_experiment(spec, *task, e);
  for (const auto& m : log.final_state.clients) t.last_local.push_back(m.last_local_end);
  return t;
}

bool identical(const Trace& a, const Trace& b) {
  if (a.globals.size() != b.globals.size() || a.last_local.size() != b.last_local.size()) return false;
  for (std::size_t i = 0; i < a.globals.size(); ++i) {
    if (!bit_identical(a.globals[i], b.globals[i])) return false;
  }
  for (std::size_t i = 0; i < a.last_local.size(); ++i) {
    if (!bit_identical(a.last_local[i], b.last_local[i])) return false;
  }
  return true;
}

// Median across replicates of a per-record quantity, keyed by round.
template <typename Get>
std::vector<std::pair<double, double>> median_series(const RunResult& r, Get get) {
  std::map<int, std::vector<double>> by_t;
  for (const auto& rep : r.replicates) {
    for (std::size_t i = 0; i < rep.log.records.size(); ++i) {
      by_t[rep.log.records[i].t].push_back(get(rep, i));
    }
  }
  std::vector<std::pair<double, double>> out;
  for (auto& [t, v] : by_t) {
    if (static_cast<int>(v.size()) == static_cast<int>(r.replicates.size())) {
      out.push_back({static_cast<double>(t), metrics::median(v)});
    }
  }
  return out;
}

// Slope over records with t >= T/2.
double second_half_slope(const std::vector<std::pair<double, double>>& s, int rounds) {
  std::vector<std::pair<double, double>> w;
  for (const auto& p : s) {
    if (p.first >= rounds / 2.0) w.push_back(p);
  }
  return metrics::loglog_slope(w);
}

std::vector<double> sweep_medians(const SweepResult& s, const std::string& v,
                                  std::optional<double> SweepCell::*field, int* ok_count = nullptr) {
  std::vector<double> xs;
  int ok = 0;
  for (const auto& c : s.cells) {
    if (c.value != v || c.status != "ok") continue;
    ++ok;
    if (c.*field) xs.push_back(*(c.*field));
  }
  if (ok_count) *ok_count = ok;
  return xs;
}

double sweep_median(const SweepResult& s, const std::string& v,
                    std::optional<double> SweepCell::*field) {
  auto xs = sweep_medians(s, v, field);
  if (xs.empty()) throw NumericError("no successful cells for " + s.axis + "=" + v);
  return metrics::median(xs);
}

CriterionResult result(bool passed, std::string detail) {
  CriterionResult r;
  r.passed = passed;
  r.detail = std::move(detail);
  return r;
}

// ---------------------------------------------------------------------------
// Criteria.

CriterionResult exact_reduction() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"exact_reduction_quadratic", "exact_reduction_logistic"}) {
    const auto base = values(name);
    const Trace a = trace(build_config(set(base, {{"fedcore.strategy", "fedavg"}})));
    const Trace b = trace(build_config(set(base, {{"fedcore.strategy", "fedinit"}, {"fedcore.beta", "0"}})));
    const bool same = identical(a, b) && a.globals.size() == 201;
    ok &= same;
    detail += std::string(detail.empty() ? "" : "; ") + name + (same ? " identical over 200 rounds" : " differs");
  }
  return result(ok, detail);
}

CriterionResult gradient_oracles() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"gradcheck_quadratic", "gradcheck_logistic", "gradcheck_mlp"}) {
    const auto g = gradcheck(build_config(values(name)));
    ok &= g.passed && g.points == 20;
    detail += std::string(detail.empty() ? "" : "; ") + std::string(name).substr(10) + " " +
              fmt(g.max_rel_error, 3) + " <= " + fmt(g.threshold, 1);
  }
  return result(ok, detail);
}

CriterionResult opt_error_rate() {
  const auto c = build_config(values("rate_pl"));
  const auto r = execute(c);
  const auto s = median_series(r, [](const ReplicateResult& rep, std::size_t i) {
    return *rep.log.records[i].opt_error;
  });
  const double slope = second_half_slope(s, c.run.rounds);
  return result(slope >= -1.4 && slope <= -0.6,
                "slope " + fmt(slope) + " in [-1.4, -0.6] (10 seeds, T=2000)");
}

CriterionResult running_average_rate() {
  const auto c = build_config(values("rate_running_average"));
  const auto r = execute(c);
  // Running average (1/(t+1)) sum_{s<=t} Delta^s per replicate, then median.
  std::vector<std::vector<double>> avg(r.replicates.size());
  for (std::size_t k = 0; k < r.replicates.size(); ++k) {
    double sum = 0.0;
    for (const auto& rec : r.replicates[k].log.records) {
      sum += rec.divergence;
      avg[k].push_back(sum / (rec.t + 1));
    }
  }
  const auto s = median_series(r, [&](const ReplicateResult& rep, std::size_t i) {
    return avg[rep.replicate][i];
  });
  const double slope = second_half_slope(s, c.run.rounds);
  return result(slope >= -1.5 && slope <= -0.5,
                "slope " + fmt(slope) + " in [-1.5, -0.5] (10 seeds, T=2000)");
}

CriterionResult divergence_rate() {
  const auto c = build_config(values("rate_pl"));
  const auto r = execute(c);
  const auto s = median_series(r, [](const ReplicateResult& rep, std::size_t i) {
    return rep.log.records[i].divergence;
  });
  const double slope = second_half_slope(s, c.run.rounds);
  return result(slope >= -2.6 && slope <= -1.4,
                "slope " + fmt(slope) + " in [-2.6, -1.4] (10 seeds, T=2000)");
}

CriterionResult beta_ordering() {
  const auto s = sweep(values("beta_ordering"), "beta", {"-0.1", "0", "0.1"}, false);
  const double d0 = sweep_median(s, "0", &SweepCell::final_divergence);
  const double d1 = sweep_median(s, "0.1", &SweepCell::final_divergence);
  const double a0 = sweep_median(s, "0", &SweepCell::test_metric);
  const double a1 = sweep_median(s, "0.1", &SweepCell::test_metric);
  const double an = sweep_median(s, "-0.1", &SweepCell::test_metric);
  const bool ok = d1 < d0 && a1 > a0 && an < a0;
  return result(ok, "median divergence " + fmt(d1) + " (0.1) vs " + fmt(d0) +
                        " (0); test metric " + fmt(an) + " (-0.1) < " + fmt(a0) + " (0) < " +
                        fmt(a1) + " (0.1)");
}

CriterionResult excessive_beta() {
  const auto base = values("excessive_beta");
  int diverged = 0;
  bool series_ok = true;
  for (int s = 0; s < 10; ++s) {
    const auto c = build_config(set(base, {{"harness.seed", std::to_string(700 + s)}}));
    const auto r = execute(c);
    if (r.exit_code != kExitDiverged) continue;
    ++diverged;
    const auto& log = r.replicates[0].log;
    series_ok &= !log.records.empty() && log.records.back().t <= log.diverged_round &&
                 log.diverged_round <= c.run.rounds;
  }
  return result(diverged >= 8 && series_ok,
                std::to_string(diverged) + "/10 seeds exit with the diverged code" +
                    (series_ok ? "; series end at the divergence flag" : "; series overrun"));
}

CriterionResult participation_speedup() {
  const auto base = values("participation_speedup");
  std::vector<double> tails;
  std::string detail;
  for (const char* n : {"5", "10", "20"}) {
    const auto r = execute(build_config(set(base, {{"fedcore.participating", n}})));
    std::vector<double> t;
    for (const auto& rep : r.replicates) t.push_back(rep.tail_grad_norm_sq);
    tails.push_back(metrics::median(t));
    detail += std::string(detail.empty() ? "" : ", ") + "N=" + n + " " + fmt(tails.back());
  }
  const bool ok = tails[1] <= tails[0] && tails[2] <= tails[1];
  return result(ok, "median tail ||grad f||^2: " + detail);
}

CriterionResult local_steps_tradeoff() {
  const std::vector<std::string> ks = {"1", "5", "20", "80"};
  const auto s = sweep(values("local_steps_tradeoff"), "K", ks, false);
  std::vector<double> m;
  std::string detail;
  for (const auto& k : ks) {
    m.push_back(sweep_median(s, k, &SweepCell::test_metric));
    detail += std::string(detail.empty() ? "" : ", ") + "K=" + k + " " + fmt(m.back());
  }
  const auto best = std::max_element(m.begin(), m.end()) - m.begin();
  const bool interior = m[best] > m.front() && m[best] > m.back();
  return result(interior, "median test metric " + detail);
}

CriterionResult stability_probe_direction() {
  const auto base = values("stability");
  const auto s50 = stability(build_config(set(base, {{"objectives.samples_per_client", "50"}})));
  const auto s200 = stability(build_config(set(base, {{"objectives.samples_per_client", "200"}})));
  const double f50 = s50.median.back(), f200 = s200.median.back();
  const bool ok = s50.spearman > 0.8 && s200.spearman > 0.8 && f200 < f50;
  return result(ok, "spearman " + fmt(s50.spearman, 3) + " (S=50), " + fmt(s200.spearman, 3) +
                        " (S=200); final median eps " + fmt(f200) + " (S=200) vs " + fmt(f50) +
                        " (S=50)");
}

CriterionResult ri_composability() {
  const auto base = values("beta_ordering");
  bool ok = true;
  std::string detail;
  for (const char* strat : {"scaffold", "fedsam"}) {
    const auto s = sweep(set(base, {{"fedcore.strategy", strat}}), "beta", {"0", "0.1"}, false);
    const double d0 = sweep_median(s, "0", &SweepCell::final_divergence);
    const double d1 = sweep_median(s, "0.1", &SweepCell::final_divergence);
    ok &= d1 <= d0;
    detail += std::string(detail.empty() ? "" : "; ") + strat + "+RI " + fmt(d1) +
              (d1 <= d0 ? " <= " : " > ") + fmt(d0);
  }
  // beta = 0 must leave every baseline's trace untouched.
  const auto short_base = set(base, {{"fedcore.rounds", "20"}, {"harness.replicates", "1"}});
  int unchanged = 0;
  const char* all[] = {"fedavg", "fedadam", "fedsam", "scaffold", "feddyn", "fedcm"};
  for (const char* strat : all) {
    auto c = build_config(set(short_base, {{"fedcore.strategy", strat}, {"fedcore.beta", "0"}}));
    const Trace with_ri = trace(c);
    c.run.algorithm.relaxed = false;
    const Trace plain = trace(c);
    unchanged += identical(with_ri, plain);
  }
  ok &= unchanged == 6;
  detail += "; beta=0 trace identical to the plain baseline for " + std::to_string(unchanged) + "/6";
  return result(ok, detail);
}

CriterionResult cost_accounting() {
  const auto base = values("cost_accounting");
  bool ok = true;
  std::string detail;
  for (const auto& e : expected_costs()) {
    const auto r =
        execute(build_config(set(base, {{"fedcore.strategy", std::string(e.strategy)}})));
    const auto& a = r.replicates[0].log.accounting;
    const bool row = a.comm_ratio() == e.comm && a.grad_ratio() == e.grads &&
                     a.storage_ratio() == e.stored;
    ok &= row;
    detail += std::string(detail.empty() ? "" : ", ") + std::string(e.strategy) + " " +
              fmt(a.comm_ratio()) +
              "x/" + fmt(a.grad_ratio()) + "x/" + fmt(a.storage_ratio()) + "x" + (row ? "" : "(!)");
  }
  return result(ok, "comm/grad/storage " + detail);
}

CriterionResult determinism_and_brute_force() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"exact_reduction_quadratic", "exact_reduction_logistic"}) {
    const auto base = set(values(name), {{"fedcore.rounds", "50"}, {"harness.replicates", "2"}});
    const auto a = rounds_csv(execute(build_config(base)));
    const auto b = rounds_csv(execute(build_config(base)));
    const auto serial =
        rounds_csv(execute(build_config(set(base, {{"fedcore.execution", "serial"}}))));
    const bool same = a == b && a == serial;
    ok &= same;
    detail += std::string(detail.empty() ? "" : "; ") + name + (same ? " byte-identical" : " differs");
  }

  // Divergence and aggregation against scalar loops on C <= 5.
  double worst = 0.0;
  for (int clients = 1; clients <= 5; ++clients) {
    Stream rng(1313, Domain::kProbe, static_cast<std::uint64_t>(clients));
    const int d = 7;
    auto random_vec = [&] {
      ParamVec v(d);
      for (int j = 0; j < d; ++j) v[j] = 3.0 * rng.normal();
      return v;
    };
    fed::FedState st = fed::make_initial_state(random_vec(), clients, fed::Strategy::kFedAvg);
    std::vector<ParamVec> locals;
    for (auto& m : st.clients) {
      m.last_local_end = random_vec();
      locals.push_back(m.last_local_end);
    }
    double naive = 0.0;
    for (int i = 0; i < clients; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j) {
        const double x = st.clients[i].last_local_end[j] - st.w_global[j];
        s += x * x;
      }
      naive += s;
    }
    naive /= clients;
    worst = std::max(worst, std::abs(metrics::divergence(st, Execution::kParallel) - naive) /
                                std::max(1.0, std::abs(naive)));
    const ParamVec agg = fed::aggregate(locals);
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < clients; ++i) s += locals[i][j];
      s /= clients;
      worst = std::max(worst, std::abs(agg[j] - s) / std::max(1.0, std::abs(s)));
    }
  }
  ok &= worst <= 1e-12;
  detail += "; brute-force max error " + fmt(worst, 3) + " <= 1e-12";
  return result(ok, detail);
}

constexpr CostExpectation kCosts[] = {
    {"fedavg", 1, 1, 1}, {"fedadam", 1, 1, 1}, {"fedsam", 1, 2, 2}, {"scaffold", 2, 1, 3},
    {"feddyn", 1, 1, 3}, {"fedcm", 2, 1, 2},  {"fedinit", 1, 1, 1},
};

constexpr Criterion kCriteria[] = {
    {1, "exact reduction (FedInit beta=0 vs FedAvg)",
     "fedsim run configs/acceptance/exact_reduction_{quadratic,logistic}.conf", 60, exact_reduction},
    {2, "gradient oracles",
     "fedsim gradcheck configs/acceptance/gradcheck_{quadratic,logistic,mlp}.conf", 60, gradient_oracles},
    {3, "optimization-error rate under PL", "fedsim run configs/acceptance/rate_pl.conf", 300,
     opt_error_rate},
    {4, "running-average divergence rate", "fedsim run configs/acceptance/rate_running_average.conf",
     300, running_average_rate},
    {5, "divergence rate under PL", "fedsim run configs/acceptance/rate_pl.conf", 300, divergence_rate},
    {6, "beta ordering of divergence and test metric",
     "fedsim sweep configs/acceptance/beta_ordering.conf --axis beta --values -0.1,0,0.1", 600,
     beta_ordering},
    {7, "divergence at excessive beta", "fedsim run configs/acceptance/excessive_beta.conf", 600,
     excessive_beta},
    {8, "participation speedup direction",
     "fedsim sweep configs/acceptance/participation_speedup.conf --axis N --values 5,10,20", 600,
     participation_speedup},
    {9, "local-steps trade-off",
     "fedsim sweep configs/acceptance/local_steps_tradeoff.conf --axis K --values 1,5,20,80", 600,
     local_steps_tradeoff},
    {10, "stability probe direction", "fedsim stability configs/acceptance/stability.conf", 600,
     stability_probe_direction},
    {11, "relaxed initialization composability",
     "fedsim sweep configs/acceptance/beta_ordering.conf --axis beta --values 0,0.1 (strategy scaffold, fedsam)",
     600, ri_composability},
    {12, "cost accounting", "fedsim run configs/acceptance/cost_accounting.conf", 60, cost_accounting},
    {13, "determinism and brute-force equivalence",
     "fedsim run configs/acceptance/exact_reduction_quadratic.conf (twice)", 120,
     determinism_and_brute_force},
};

constexpr std::string_view kNames[] = {
    "exact_reduction_quadratic", "exact_reduction_logistic", "gradcheck_quadratic",
    "gradcheck_logistic", "gradcheck_mlp", "rate_pl", "rate_running_average", "beta_ordering",
    "excessive_beta", "participation_speedup", "local_steps_tradeoff", "stability",
    "cost_accounting",
};

}  // namespace

std::span<const Criterion> acceptance_criteria() { return kCriteria; }

std::span<const CostExpectation> expected_costs() { return kCosts; }

std::span<const std::string_view> acceptance_config_names() { return kNames; }

std::string_view acceptance_config(std::string_view name) {
  for (const auto& [n, text] : kConfigs) {
    if (n == name) return text;
  }
  throw InvalidArgument("unknown acceptance config '" + std::string(name) + "'");
}

std::string acceptance_config_file(std::string_view name) {
  static constexpr std::string_view kHeader = R"(# Copyright 2026 The fedsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

)";
  return std::string(kHeader) + std::string(acceptance_config(name));
}

CriterionResult run_criterion(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = c.run();
  } catch (const ConfigError& e) {
    r.passed = false;
    r.detail = "config error:";
    for (const auto& p : e.problems()) r.detail += " " + p;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = c.id;
  r.name = std::string(c.name);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (r.seconds > c.time_limit_seconds) {
    r.passed = false;
    r.detail += "; exceeded time limit of " + fmt(c.time_limit_seconds) + " s";
  }
  return r;
}

}  // namespace fedsim::harness
