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

#include "fedsim/harness/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fedsim/core/error.hpp"
#include "fedsim/core/rng.hpp"
#include "fedsim/objectives/analysis.hpp"

namespace fedsim::harness {

namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

fed::EvalOptions eval_options(const ExperimentConfig& c) {
  fed::EvalOptions e;
  e.record_every = c.metrics.record_every;
  e.test_metrics = c.metrics.test_metrics;
  e.blowup_factor = c.metrics.blowup_factor;
  e.guards = c.guards;
  return e;
}

void summarize(ReplicateResult& r) {
  const auto& recs = r.log.records;
  if (recs.empty()) return;
  const int last_t = recs.back().t;
  double g = 0.0, d = 0.0;
  int ng = 0;
  for (const auto& rec : recs) {
    d += rec.divergence;
    if (4 * rec.t >= 3 * last_t) {
      g += rec.grad_norm_sq;
      ++ng;
    }
  }
  r.tail_grad_norm_sq = ng ? g / ng : 0.0;
  r.mean_divergence = d / static_cast<double>(recs.size());
}

ReplicateResult run_replicate(const ExperimentConfig& c, int rep) {
  ReplicateResult r;
  r.replicate = rep;
  r.seed = replicate_seed(c.seed, rep);
  auto task = make_task(c, r.seed);
  if (c.wants_oracle()) {
    auto o = objectives::centralized_oracle(*task, c.oracle_steps, 1.0,
                                            hash_combine(r.seed, hash_tag("oracle")));
    r.oracle_failed = !o.converged;
  }
  fed::RunSpec spec = c.run;
  spec.seed = r.seed;
  r.log = fed::run_experiment(spec, *task, eval_options(c));
  summarize(r);
  if (!task->optimum()) {
    r.risk_note = "unavailable: needs centralized_oracle";
  } else if (r.log.status != fed::RunStatus::kOk) {
    r.risk_note = "unavailable: run diverged";
  } else {
    r.risk = metrics::excess_risk_report(r.log, *task);
    if (r.oracle_failed) r.risk_note = "oracle did not reach tolerance";
  }
  return r;
}

}  // namespace

RunResult execute(const ExperimentConfig& config) {
  // Surface configuration problems once, before any replicate runs.
  {
    auto probe = make_task(config, replicate_seed(config.seed, 0));
    auto problems = fed::validate_run(config.run, *probe, config.guards);
    if (!problems.empty()) throw ConfigError(std::move(problems));
  }
  fed::Guards known = config.guards;
  known.allow_unsafe_eta = true;  // already checked above
  ExperimentConfig cfg = config;
  cfg.guards = known;

  RunResult out;
  out.config = config;
  out.replicates.resize(config.replicates);
  std::exception_ptr failure;
  const bool concurrent = config.replicates > 1;
#pragma omp parallel for schedule(dynamic) if (concurrent)
  for (int rep = 0; rep < config.replicates; ++rep) {
    try {
      out.replicates[rep] = run_replicate(cfg, rep);
    } catch (...) {
#pragma omp critical(fedsim_replicate_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  bool diverged = false, oracle = false;
  for (const auto& r : out.replicates) {
    diverged |= r.log.status == fed::RunStatus::kDiverged;
    oracle |= r.oracle_failed;
  }
  out.exit_code = diverged ? kExitDiverged : oracle ? kExitOracleFailure : kExitOk;
  return out;
}

std::string rounds_csv(const RunResult& result) {
  std::ostringstream os;
  os << "replicate,t,eta,train_loss,grad_norm_sq,divergence,opt_error,test_loss,"
        "test_metric,comm_vectors,grad_evals\n";
  for (const auto& r : result.replicates) {
    for (const auto& rec : r.log.records) {
      os << r.replicate << ',' << rec.t << ',' << num(rec.eta) << ','
         << num(rec.train_loss) << ',' << num(rec.grad_norm_sq) << ','
         << num(rec.divergence) << ',' << opt_num(rec.opt_error) << ','
         << opt_num(rec.test_loss) << ',' << opt_num(rec.test_metric) << ','
         << rec.comm_vectors << ',' << rec.grad_evals << '\n';
    }
  }
  return os.str();
}

std::string summary_json(const RunResult& result) {
  const auto& c = result.config;
  json j;
  json cfg = json::object();
  for (const auto& [k, v] : c.resolved.entries) cfg[k] = v;
  j["config"] = cfg;
  j["task"] = std::string(objectives::to_string(c.task));
  j["strategy"] = std::string(fed::to_string(c.run.algorithm.strategy));
  j["beta"] = c.run.algorithm.beta;
  j["clients"] = c.clients();
  j["participating"] = c.run.participating;
  j["local_steps"] = c.run.local_steps;
  j["rounds"] = c.run.rounds;
  j["schedule"] = std::string(fed::to_string(c.run.schedule.kind));
  j["exit_code"] = result.exit_code;
  const auto cost = fed::strategy_cost(c.run.algorithm.strategy);
  j["stored_per_client"] = cost.stored_per_client;

  json reps = json::array();
  std::vector<double> metric, delta, loss;
  for (const auto& r : result.replicates) {
    json jr;
    jr["replicate"] = r.replicate;
    jr["seed"] = r.seed;
    jr["status"] = r.log.status == fed::RunStatus::kOk ? "ok" : "diverged";
    jr["diverged_round"] = r.log.diverged_round;
    jr["max_loss"] = r.log.max_loss;
    jr["tail_grad_norm_sq"] = r.tail_grad_norm_sq;
    jr["mean_divergence"] = r.mean_divergence;
    if (!r.log.records.empty()) {
      const auto& f = r.log.records.back();
      jr["final"] = {{"t", f.t},
                     {"train_loss", f.train_loss},
                     {"grad_norm_sq", f.grad_norm_sq},
                     {"divergence", f.divergence},
                     {"opt_error", opt_json(f.opt_error)},
                     {"test_loss", opt_json(f.test_loss)},
                     {"test_metric", opt_json(f.test_metric)}};
      if (r.log.status == fed::RunStatus::kOk) {
        delta.push_back(f.divergence);
        loss.push_back(f.train_loss);
        if (f.test_metric) metric.push_back(*f.test_metric);
      }
    }
    const auto& a = r.log.accounting;
    jr["accounting"] = {{"comm_vectors", a.comm_vectors},
                        {"grad_evals", a.grad_evals},
                        {"rounds", a.rounds},
                        {"comm_ratio", a.comm_ratio()},
                        {"grad_ratio", a.grad_ratio()},
                        {"storage_ratio", a.storage_ratio()}};
    if (r.risk) {
      jr["excess_risk"] = {{"E_O", r.risk->optimization},
                           {"E_G", r.risk->generalization},
                           {"E_E", r.risk->excess}};
    } else {
      jr["excess_risk"] = nullptr;
    }
    reps.push_back(jr);
  }
  j["replicates"] = reps;
  json med;
  med["test_metric"] = metric.empty() ? json(nullptr) : json(metrics::median(metric));
  med["divergence"] = delta.empty() ? json(nullptr) : json(metrics::median(delta));
  med["train_loss"] = loss.empty() ? json(nullptr) : json(metrics::median(loss));
  j["median"] = med;
  return j.dump(2) + "\n";
}

std::string excess_risk_text(const RunResult& result) {
  std::ostringstream os;
  os.precision(6);
  for (const auto& r : result.replicates) {
    os << "replicate " << r.replicate << " (seed " << r.seed << "): "
       << (r.log.status == fed::RunStatus::kOk ? "ok" : "diverged at round " +
                                                             std::to_string(r.log.diverged_round))
       << "\n";
    if (r.risk) {
      os << "  E_O (optimization)   " << r.risk->optimization << "\n"
         << "  E_G (generalization) " << r.risk->generalization << "\n"
         << "  E_E (excess risk)    " << r.risk->excess << "\n"
         << "  max observed loss    " << r.risk->max_loss << "\n"
         << "  divergence final/max/tail-mean " << r.risk->divergence.final << " / "
         << r.risk->divergence.max << " / " << r.risk->divergence.tail_mean << "\n";
    }
    if (!r.risk_note.empty()) os << "  note: " << r.risk_note << "\n";
  }
  return os.str();
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << body;
  };
  put("rounds.csv", rounds_csv(result));
  put("summary.json", summary_json(result));
  put("excess_risk.txt", excess_risk_text(result));
  std::ostringstream cfg;
  std::string section;
  for (const auto& k : config_schema()) {
    const std::string full = std::string(k.section) + "." + std::string(k.key);
    if (section != k.section) {
      section = k.section;
      cfg << (cfg.tellp() > 0 ? "\n" : "") << "[" << section << "]\n";
    }
    cfg << k.key << " = " << result.config.resolved.entries.at(full) << "\n";
  }
  put("config.resolved", cfg.str());
}

std::string sweep_axis_key(const std::string& axis) {
  if (axis == "beta") return "fedcore.beta";
  if (axis == "K") return "fedcore.local_steps";
  if (axis == "N") return "fedcore.participating";
  if (axis == "Dr") return "partition.dirichlet";
  throw ConfigError({"sweep axis must be one of beta, K, N, Dr (got '" + axis + "')"});
}

SweepResult sweep(const ConfigValues& base, const std::string& axis,
                  const std::vector<std::string>& values, bool write) {
  if (values.empty()) throw ConfigError({"sweep needs at least one value"});
  const std::string key = sweep_axis_key(axis);
  SweepResult out;
  out.axis = axis;
  out.values = values;
  for (const auto& v : values) {
    try {
      ExperimentConfig c = build_config(with_override(base, key, v));
      RunResult res = execute(c);
      if (write) write_outputs(res, std::filesystem::path(c.output) / (axis + "=" + v));
      for (const auto& r : res.replicates) {
        SweepCell cell;
        cell.value = v;
        cell.replicate = r.replicate;
        cell.status = r.log.status == fed::RunStatus::kOk ? "ok" : "diverged";
        if (r.log.status == fed::RunStatus::kOk && !r.log.records.empty()) {
          const auto& f = r.log.records.back();
          cell.test_metric = f.test_metric;
          cell.final_divergence = f.divergence;
          cell.final_loss = f.train_loss;
          if (r.risk) {
            cell.opt_error = r.risk->optimization;
            cell.gen_gap = r.risk->generalization;
          }
        }
        out.cells.push_back(cell);
      }
    } catch (const ConfigError& e) {
      std::string msg;
      for (const auto& p : e.problems()) msg += (msg.empty() ? "" : "; ") + p;
      SweepCell cell;
      cell.value = v;
      cell.replicate = -1;
      cell.status = "error: " + msg;
      out.cells.push_back(cell);
    } catch (const std::exception& e) {
      SweepCell cell;
      cell.value = v;
      cell.replicate = -1;
      cell.status = std::string("error: ") + e.what();
      out.cells.push_back(cell);
    }
  }

  std::ostringstream os;
  os.precision(6);
  os << axis << "\treplicate\tstatus\ttest_metric\tdivergence_T\tE_O\tE_G\n";
  auto cell_str = [](const std::optional<double>& x) {
    if (!x) return std::string("-");
    std::ostringstream s;
    s.precision(6);
    s << *x;
    return s.str();
  };
  for (const auto& c : out.cells) {
    os << c.value << '\t' << c.replicate << '\t' << c.status << '\t' << cell_str(c.test_metric)
       << '\t' << cell_str(c.final_divergence) << '\t' << cell_str(c.opt_error) << '\t'
       << cell_str(c.gen_gap) << '\n';
  }
  os << "\nmedians\n" << axis << "\tok\ttest_metric\tdivergence_T\tfinal_loss\n";
  std::vector<std::pair<double, std::string>> by_metric, by_delta;
  for (const auto& v : values) {
    std::vector<double> m, d, l;
    int ok = 0, total = 0;
    for (const auto& c : out.cells) {
      if (c.value != v) continue;
      ++total;
      if (c.status != "ok") continue;
      ++ok;
      if (c.test_metric) m.push_back(*c.test_metric);
      if (c.final_divergence) d.push_back(*c.final_divergence);
      if (c.final_loss) l.push_back(*c.final_loss);
    }
    auto med = [](std::vector<double> x) {
      return x.empty() ? std::optional<double>() : std::optional<double>(metrics::median(x));
    };
    const auto mm = med(m), md = med(d), ml = med(l);
    os << v << '\t' << ok << "/" << total << '\t' << cell_str(mm) << '\t' << cell_str(md)
       << '\t' << cell_str(ml) << '\n';
    if (mm) by_metric.push_back({*mm, v});
    if (md) by_delta.push_back({*md, v});
  }
  auto ordering = [](std::vector<std::pair<double, std::string>> xs, bool descending) {
    std::stable_sort(xs.begin(), xs.end(), [&](const auto& a, const auto& b) {
      return descending ? a.first > b.first : a.first < b.first;
    });
    std::string s;
    for (const auto& [_, v] : xs) s += (s.empty() ? "" : " > ") + v;
    return s;
  };
  if (!by_metric.empty()) os << "ordering by median test metric (best first): " << ordering(by_metric, true) << "\n";
  if (!by_delta.empty()) os << "ordering by median divergence (lowest first): " << ordering(by_delta, false) << "\n";
  out.table = os.str();
  return out;
}

double gradcheck_threshold(objectives::TaskKind kind) {
  switch (kind) {
    case objectives::TaskKind::kQuadratic:
      return 1e-7;
    case objectives::TaskKind::kLogistic:
      return 1e-5;
    case objectives::TaskKind::kMlp:
      return 1e-4;
  }
  return 0.0;
}

GradcheckResult gradcheck(const ExperimentConfig& config) {
  const std::uint64_t seed = replicate_seed(config.seed, 0);
  auto task = make_task(config, seed);
  GradcheckResult r;
  r.threshold = gradcheck_threshold(config.task);
  r.points = config.metrics.gradcheck_points;
  const ParamVec centre = task->initial_point(seed);
  for (int p = 0; p < r.points; ++p) {
    Stream rng(seed, Domain::kProbe, static_cast<std::uint64_t>(p), 0xc4ec);
    ParamVec w = centre;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] += rng.normal();
    r.max_rel_error = std::max(
        r.max_rel_error, objectives::finite_diff_check(*task, w, config.metrics.gradcheck_eps));
  }
  r.passed = r.max_rel_error <= r.threshold;
  return r;
}

StabilityReport stability(const ExperimentConfig& config) {
  if (config.task == objectives::TaskKind::kQuadratic) {
    throw ConfigError({"objectives.task: stability probe needs a sampled dataset (logistic or mlp)"});
  }
  if (config.run.schedule.kind != fed::Schedule::Kind::kInverseT) {
    throw ConfigError({"fedcore.lr_schedule: stability probe requires inverse_t"});
  }
  StabilityReport out;
  out.checkpoints = config.metrics.stability_checkpoints;
  if (out.checkpoints.empty()) {
    for (int k = 1; k <= 8; ++k) out.checkpoints.push_back(config.run.rounds * k / 8);
  }
  std::sort(out.checkpoints.begin(), out.checkpoints.end());
  out.checkpoints.erase(std::unique(out.checkpoints.begin(), out.checkpoints.end()),
                        out.checkpoints.end());
  out.epsilon.resize(config.replicates);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) if (config.replicates > 1)
  for (int rep = 0; rep < config.replicates; ++rep) {
    try {
      const std::uint64_t seed = replicate_seed(config.seed, rep);
      auto task = make_task(config, seed);
      const auto& ds = dynamic_cast<const objectives::DatasetTask&>(*task);
      fed::RunSpec spec = config.run;
      spec.seed = seed;
      metrics::StabilityOptions so;
      so.checkpoints = out.checkpoints;
      so.probe_points = config.metrics.stability_probe_points;
      so.probe_seed = hash_combine(seed, hash_tag("stability"));
      out.epsilon[rep] = metrics::stability_probe(spec, ds, config.metrics.stability_client,
                                                  config.metrics.stability_position, so,
                                                  config.guards)
                             .epsilon;
    } catch (...) {
#pragma omp critical(fedsim_stability_rep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<double> x;
  for (std::size_t c = 0; c < out.checkpoints.size(); ++c) {
    std::vector<double> col;
    for (const auto& e : out.epsilon) col.push_back(e[c]);
    out.median.push_back(metrics::median(col));
    x.push_back(out.checkpoints[c]);
  }
  out.spearman = out.checkpoints.size() >= 2 ? metrics::spearman(x, out.median) : 0.0;
  return out;
}

namespace {

int report_config_error(const ConfigError& e, std::ostream& err) {
  err << "config error:\n";
  for (const auto& p : e.problems()) err << "  " << p << "\n";
  return kExitConfigError;
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return report_config_error(e, err);
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const OracleFailure& e) {
    err << "oracle failure: " << e.what() << "\n";
    return kExitOracleFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_run(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = parse_config_file(path);
    const RunResult res = execute(c);
    write_outputs(res, c.output);
    for (const auto& r : res.replicates) {
      out << "replicate " << r.replicate << ": ";
      if (r.log.status == fed::RunStatus::kOk) {
        const auto& f = r.log.records.back();
        out << "ok, T=" << f.t << " loss=" << f.train_loss << " divergence=" << f.divergence;
        if (f.test_metric) out << " test_metric=" << *f.test_metric;
      } else {
        out << "diverged at round " << r.log.diverged_round;
      }
      if (r.oracle_failed) out << " (oracle did not converge)";
      out << "\n";
    }
    out << "wrote " << c.output << "\n";
    return res.exit_code;
  });
}

int cmd_sweep(const std::filesystem::path& path, const std::string& axis,
              const std::vector<std::string>& values, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ConfigValues base = read_config_file(path);
    build_config(base);  // fail fast on a bad base config
    const SweepResult s = sweep(base, axis, values, true);
    out << s.table;
    const ExperimentConfig c = build_config(base);
    std::filesystem::create_directories(c.output);
    std::ofstream(std::filesystem::path(c.output) / ("sweep_" + axis + ".tsv")) << s.table;
    return kExitOk;
  });
}

int cmd_gradcheck(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = parse_config_file(path);
    const GradcheckResult g = gradcheck(c);
    out << objectives::to_string(c.task) << ": max relative error " << g.max_rel_error
        << " over " << g.points << " points (threshold " << g.threshold << ") "
        << (g.passed ? "PASS" : "FAIL") << "\n";
    return g.passed ? kExitOk : kExitOracleFailure;
  });
}

int cmd_stability(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig c = parse_config_file(path);
    const StabilityReport s = stability(c);
    std::ostringstream csv;
    csv << "replicate,checkpoint,epsilon\n";
    for (std::size_t r = 0; r < s.epsilon.size(); ++r) {
      for (std::size_t k = 0; k < s.checkpoints.size(); ++k) {
        csv << r << ',' << s.checkpoints[k] << ',' << num(s.epsilon[r][k]) << '\n';
      }
    }
    std::filesystem::create_directories(c.output);
    std::ofstream(std::filesystem::path(c.output) / "stability.csv", std::ios::binary) << csv.str();
    out << "checkpoint\tmedian_epsilon\n";
    for (std::size_t k = 0; k < s.checkpoints.size(); ++k) {
      out << s.checkpoints[k] << '\t' << s.median[k] << '\n';
    }
    out << "spearman(checkpoint, median) = " << s.spearman << "\n";
    return kExitOk;
  });
}

}  // namespace fedsim::harness
