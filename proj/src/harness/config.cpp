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

#include "fedsim/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fedsim/core/error.hpp"
#include "fedsim/core/rng.hpp"
#include "fedsim/objectives/constants.hpp"

namespace fedsim::harness {

namespace {

using VT = ValueType;

constexpr KeySpec kSchema[] = {
    {"objectives", "task", VT::kChoice, "", "objective family", "quadratic|logistic|mlp", true},
    {"objectives", "clients", VT::kInt, "100", "number of clients C"},
    {"objectives", "dim", VT::kInt, "10", "quadratic: parameter dimension"},
    {"objectives", "hetero_scale", VT::kReal, "0.5", "quadratic: ||b_i - mean b|| for every client"},
    {"objectives", "condition_number", VT::kReal, "10", "quadratic: eigenvalue spread of the shared Hessian"},
    {"objectives", "noise_sigma", VT::kReal, "0", "quadratic: stochastic gradient noise, E||g - grad||^2 = sigma^2"},
    {"objectives", "features", VT::kInt, "20", "classification: input features"},
    {"objectives", "classes", VT::kInt, "10", "classification: label classes"},
    {"objectives", "samples_per_client", VT::kInt, "50", "classification: samples per client S"},
    {"objectives", "separation", VT::kReal, "1.0", "classification: class-mean scale"},
    {"objectives", "noise", VT::kReal, "1.0", "classification: within-class noise scale"},
    {"objectives", "weight_decay", VT::kReal, "0.001", "classification: L2 coefficient in every per-sample loss"},
    {"objectives", "hidden", VT::kInt, "16", "mlp: hidden width (at most 32)"},
    {"objectives", "heldout_size", VT::kInt, "0", "classification: held-out samples; 0 means max(1000, 10 S)"},
    {"objectives", "oracle", VT::kChoice, "auto", "compute w* with the centralized oracle; auto = logistic only", "auto|on|off"},
    {"objectives", "oracle_steps", VT::kInt, "5000", "oracle iteration cap"},
    {"objectives", "task_seed", VT::kString, "", "fixed data seed shared by all replicates; empty derives it from each replicate seed"},
    {"partition", "dirichlet", VT::kReal, "0.1", "Dirichlet concentration Dr of the label skew"},
    {"fedcore", "strategy", VT::kChoice, "", "training strategy; fedinit is fedavg with relaxed initialization",
     "fedavg|fedadam|fedsam|scaffold|feddyn|fedcm|fedinit", true},
    {"fedcore", "beta", VT::kReal, "", "relaxation coefficient; 0.1 for fedinit, 0 otherwise"},
    {"fedcore", "participating", VT::kInt, "10", "clients per round N"},
    {"fedcore", "local_steps", VT::kInt, "5", "local iterations K"},
    {"fedcore", "rounds", VT::kInt, "500", "communication rounds T"},
    {"fedcore", "batch_size", VT::kInt, "50", "minibatch size"},
    {"fedcore", "lr_schedule", VT::kChoice, "multiplicative", "local learning-rate schedule",
     "constant|multiplicative|inverse_t|inverse_sqrt_t|log_over_t"},
    {"fedcore", "lr", VT::kReal, "0.1", "initial local learning rate (constant, multiplicative)"},
    {"fedcore", "lr_decay", VT::kReal, "", "per-round multiplicative decay; 0.999 for feddyn, 0.998 otherwise"},
    {"fedcore", "lr_scale", VT::kReal, "0.1", "c in c/(t+t0), c/sqrt(t+t0), c log(t+t0)/(t+t0)"},
    {"fedcore", "lr_offset", VT::kReal, "1", "t0 of the t-dependent schedules"},
    {"fedcore", "global_lr", VT::kReal, "1.0", "server step on the aggregated update"},
    {"fedcore", "adam_lr", VT::kReal, "0.1", "fedadam: server learning rate"},
    {"fedcore", "adam_beta1", VT::kReal, "0.9", "fedadam: first-moment decay"},
    {"fedcore", "adam_beta2", VT::kReal, "0.99", "fedadam: second-moment decay"},
    {"fedcore", "adam_eps", VT::kReal, "0.001", "fedadam: denominator floor"},
    {"fedcore", "sam_rho", VT::kReal, "0.1", "fedsam: ascent radius"},
    {"fedcore", "dyn_alpha", VT::kReal, "0.1", "feddyn: proximal coefficient"},
    {"fedcore", "cm_alpha", VT::kReal, "0.1", "fedcm: weight of the local gradient"},
    {"fedcore", "execution", VT::kChoice, "parallel", "client training kernel", "parallel|serial"},
    {"metrics", "record_every", VT::kInt, "1", "telemetry interval in rounds (the final round is always recorded)"},
    {"metrics", "test_metrics", VT::kBool, "true", "evaluate held-out loss and accuracy"},
    {"metrics", "blowup_factor", VT::kReal, "1e6", "loss gap growth over the initial gap that counts as diverged"},
    {"metrics", "probe_budget", VT::kInt, "200", "gradient probes for constant estimation"},
    {"metrics", "gradcheck_points", VT::kInt, "20", "random points for gradcheck"},
    {"metrics", "gradcheck_eps", VT::kReal, "1e-5", "central-difference step"},
    {"metrics", "stability_client", VT::kInt, "0", "client holding the replaced sample"},
    {"metrics", "stability_position", VT::kInt, "0", "index of the replaced sample on that client"},
    {"metrics", "stability_probe_points", VT::kInt, "500", "fresh samples per stability estimate"},
    {"metrics", "stability_checkpoints", VT::kIntList, "", "rounds to compare, comma separated; empty means 8 evenly spaced"},
    {"harness", "seed", VT::kInt, "0", "master seed"},
    {"harness", "replicates", VT::kInt, "1", "independent replicates"},
    {"harness", "output", VT::kString, "runs/default", "output directory"},
    {"harness", "allow_unsafe_beta", VT::kBool, "false", "permit |beta| >= sqrt(6)/24"},
    {"harness", "allow_unsafe_eta", VT::kBool, "false", "permit learning rates above min{N/(2CKL), 1/(NKL)}"},
};

const KeySpec* find_key(std::string_view full) {
  for (const auto& k : kSchema) {
    if (full.size() == k.section.size() + 1 + k.key.size() &&
        full.substr(0, k.section.size()) == k.section && full[k.section.size()] == '.' &&
        full.substr(k.section.size() + 1) == k.key) {
      return &k;
    }
  }
  return nullptr;
}

bool known_section(std::string_view s) {
  return std::any_of(std::begin(kSchema), std::end(kSchema),
                     [&](const KeySpec& k) { return k.section == s; });
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<long long> to_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> to_real(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  return std::nullopt;
}

bool in_choices(std::string_view choices, std::string_view v) {
  std::size_t start = 0;
  while (start <= choices.size()) {
    auto bar = choices.find('|', start);
    if (bar == std::string_view::npos) bar = choices.size();
    if (choices.substr(start, bar - start) == v) return true;
    start = bar + 1;
  }
  return false;
}

std::optional<std::vector<int>> to_int_list(std::string_view s) {
  std::vector<int> out;
  std::string token;
  std::istringstream in{std::string(s)};
  while (std::getline(in, token, ',')) {
    auto v = to_int(trim(token));
    if (!v) return std::nullopt;
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

std::string where(const ConfigValues& v, const std::string& key) {
  auto it = v.lines.find(key);
  if (it == v.lines.end()) return key;
  return v.origin + ":" + std::to_string(it->second) + ": " + key;
}

// Typed view over the resolved values that collects problems.
class Reader {
 public:
  Reader(const ConfigValues& v, std::vector<std::string>& problems)
      : v_(v), problems_(problems) {}

  bool has(const std::string& key) const {
    auto it = v_.entries.find(key);
    return it != v_.entries.end() && !it->second.empty();
  }
  std::string raw(const std::string& key) const {
    auto it = v_.entries.find(key);
    if (it != v_.entries.end()) return it->second;
    return std::string(find_key(key)->default_value);
  }
  long long integer(const std::string& key, long long fallback = 0) {
    auto v = to_int(raw(key));
    if (!v) return fallback;
    return *v;
  }
  double real(const std::string& key, double fallback = 0.0) {
    auto v = to_real(raw(key));
    if (!v) return fallback;
    return *v;
  }
  bool boolean(const std::string& key) { return to_bool(raw(key)).value_or(false); }

  void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) problems_.push_back(where(v_, key) + ": " + what);
  }

 private:
  const ConfigValues& v_;
  std::vector<std::string>& problems_;
};

void check_types(const ConfigValues& values, std::vector<std::string>& problems) {
  for (const auto& k : kSchema) {
    const std::string full = std::string(k.section) + "." + std::string(k.key);
    auto it = values.entries.find(full);
    if (it == values.entries.end() || it->second.empty()) {
      if (k.required) problems.push_back(full + ": required key is missing");
      continue;
    }
    const std::string& s = it->second;
    bool ok = true;
    std::string want;
    switch (k.type) {
      case VT::kInt:
        ok = to_int(s).has_value();
        want = "an integer";
        break;
      case VT::kReal:
        ok = to_real(s).has_value();
        want = "a finite number";
        break;
      case VT::kBool:
        ok = to_bool(s).has_value();
        want = "true or false";
        break;
      case VT::kChoice:
        ok = in_choices(k.choices, s);
        want = "one of " + std::string(k.choices);
        break;
      case VT::kIntList:
        ok = to_int_list(s).has_value();
        want = "a comma-separated list of integers";
        break;
      case VT::kString:
        break;
    }
    if (!ok) problems.push_back(where(values, full) + ": expected " + want + ", got '" + s + "'");
  }
}

}  // namespace

std::span<const KeySpec> config_schema() { return kSchema; }

std::string_view to_string(ValueType t) {
  switch (t) {
    case VT::kInt:
      return "int";
    case VT::kReal:
      return "real";
    case VT::kBool:
      return "bool";
    case VT::kString:
      return "string";
    case VT::kChoice:
      return "choice";
    case VT::kIntList:
      return "int list";
  }
  return "?";
}

ConfigValues read_config_text(std::string_view text, std::string origin) {
  ConfigValues out;
  out.origin = std::move(origin);
  std::vector<std::string> problems;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const std::string at = out.origin + ":" + std::to_string(lineno) + ": ";
    if (body.front() == '[') {
      if (body.back() != ']') {
        problems.push_back(at + "malformed section header '" + body + "'");
        continue;
      }
      section = trim(std::string_view(body).substr(1, body.size() - 2));
      if (!known_section(section)) {
        problems.push_back(at + "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      problems.push_back(at + "expected 'key = value', got '" + body + "'");
      continue;
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (section.empty()) {
      problems.push_back(at + "key '" + key + "' appears before any [section]");
      continue;
    }
    const std::string full = section + "." + key;
    if (!find_key(full)) {
      if (known_section(section)) problems.push_back(at + full + ": unknown key");
      continue;
    }
    if (out.entries.count(full)) {
      problems.push_back(at + full + ": duplicate key (first set on line " +
                         std::to_string(out.lines[full]) + ")");
      continue;
    }
    out.entries[full] = value;
    out.lines[full] = lineno;
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return out;
}

ConfigValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path.string() + ": cannot open config file"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_config_text(ss.str(), path.string());
}

ConfigValues with_override(ConfigValues values, const std::string& key,
                           const std::string& value) {
  if (!find_key(key)) throw ConfigError({key + ": unknown key"});
  values.entries[key] = value;
  values.lines.erase(key);
  return values;
}

int ExperimentConfig::clients() const {
  return task == objectives::TaskKind::kQuadratic ? quadratic.clients
                                                  : classification.clients;
}

bool ExperimentConfig::wants_oracle() const {
  if (task == objectives::TaskKind::kQuadratic) return false;
  if (oracle == OracleMode::kAuto) return task == objectives::TaskKind::kLogistic;
  return oracle == OracleMode::kOn;
}

ExperimentConfig build_config(const ConfigValues& values) {
  std::vector<std::string> problems;
  check_types(values, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));

  Reader r(values, problems);
  ExperimentConfig c;
  c.task = objectives::parse_task_kind(r.raw("objectives.task"));
  const int clients = static_cast<int>(r.integer("objectives.clients"));

  c.quadratic.clients = clients;
  c.quadratic.dim = static_cast<int>(r.integer("objectives.dim"));
  c.quadratic.hetero_scale = r.real("objectives.hetero_scale");
  c.quadratic.condition_number = r.real("objectives.condition_number");
  c.quadratic.noise_sigma = r.real("objectives.noise_sigma");

  auto& cs = c.classification;
  cs.clients = clients;
  cs.features = static_cast<int>(r.integer("objectives.features"));
  cs.classes = static_cast<int>(r.integer("objectives.classes"));
  cs.samples_per_client = static_cast<int>(r.integer("objectives.samples_per_client"));
  cs.separation = r.real("objectives.separation");
  cs.noise = r.real("objectives.noise");
  cs.weight_decay = r.real("objectives.weight_decay");
  cs.hidden = static_cast<int>(r.integer("objectives.hidden"));
  cs.heldout_size = static_cast<int>(r.integer("objectives.heldout_size"));
  cs.dirichlet = r.real("partition.dirichlet");

  const std::string oracle = r.raw("objectives.oracle");
  c.oracle = oracle == "on" ? OracleMode::kOn : oracle == "off" ? OracleMode::kOff : OracleMode::kAuto;
  c.oracle_steps = static_cast<int>(r.integer("objectives.oracle_steps"));
  if (r.has("objectives.task_seed")) {
    auto s = to_int(r.raw("objectives.task_seed"));
    r.require(s.has_value() && *s >= 0, "objectives.task_seed", "expected a non-negative integer");
    if (s) c.task_seed = static_cast<std::uint64_t>(*s);
  }

  const std::string strategy = r.raw("fedcore.strategy");
  const bool fedinit = strategy == "fedinit";
  auto& algo = c.run.algorithm;
  algo.strategy = fedinit ? fed::Strategy::kFedAvg : fed::parse_strategy(strategy);
  algo.beta = r.has("fedcore.beta") ? r.real("fedcore.beta") : (fedinit ? 0.1 : 0.0);
  algo.params.global_lr = r.real("fedcore.global_lr");
  algo.params.adam_lr = r.real("fedcore.adam_lr");
  algo.params.adam_beta1 = r.real("fedcore.adam_beta1");
  algo.params.adam_beta2 = r.real("fedcore.adam_beta2");
  algo.params.adam_eps = r.real("fedcore.adam_eps");
  algo.params.sam_rho = r.real("fedcore.sam_rho");
  algo.params.dyn_alpha = r.real("fedcore.dyn_alpha");
  algo.params.cm_alpha = r.real("fedcore.cm_alpha");

  c.run.participating = static_cast<int>(r.integer("fedcore.participating"));
  c.run.local_steps = static_cast<int>(r.integer("fedcore.local_steps"));
  c.run.rounds = static_cast<int>(r.integer("fedcore.rounds"));
  c.run.batch_size = static_cast<int>(r.integer("fedcore.batch_size"));
  c.run.schedule.kind = fed::parse_schedule_kind(r.raw("fedcore.lr_schedule"));
  c.run.schedule.eta0 = r.real("fedcore.lr");
  c.run.schedule.decay = r.has("fedcore.lr_decay")
                             ? r.real("fedcore.lr_decay")
                             : (algo.strategy == fed::Strategy::kFedDyn ? 0.999 : 0.998);
  c.run.schedule.c = r.real("fedcore.lr_scale");
  c.run.schedule.offset = r.real("fedcore.lr_offset");
  c.run.execution = r.raw("fedcore.execution") == "serial" ? Execution::kSerial : Execution::kParallel;

  auto& m = c.metrics;
  m.record_every = static_cast<int>(r.integer("metrics.record_every"));
  m.test_metrics = r.boolean("metrics.test_metrics");
  m.blowup_factor = r.real("metrics.blowup_factor");
  m.probe_budget = static_cast<int>(r.integer("metrics.probe_budget"));
  m.gradcheck_points = static_cast<int>(r.integer("metrics.gradcheck_points"));
  m.gradcheck_eps = r.real("metrics.gradcheck_eps");
  m.stability_client = static_cast<int>(r.integer("metrics.stability_client"));
  m.stability_position = static_cast<int>(r.integer("metrics.stability_position"));
  m.stability_probe_points = static_cast<int>(r.integer("metrics.stability_probe_points"));
  if (r.has("metrics.stability_checkpoints")) {
    m.stability_checkpoints = *to_int_list(r.raw("metrics.stability_checkpoints"));
  }

  c.seed = static_cast<std::uint64_t>(r.integer("harness.seed"));
  c.replicates = static_cast<int>(r.integer("harness.replicates"));
  c.output = r.raw("harness.output");
  c.guards.allow_unsafe_beta = r.boolean("harness.allow_unsafe_beta");
  c.guards.allow_unsafe_eta = r.boolean("harness.allow_unsafe_eta");

  // Invariants, each naming the inequality it enforces.
  const auto N = c.run.participating;
  r.require(clients >= 1, "objectives.clients", "need C >= 1");
  r.require(N >= 1, "fedcore.participating", "need N >= 1");
  r.require(N <= clients, "fedcore.participating",
            "need N ≤ C (N=" + std::to_string(N) + ", C=" + std::to_string(clients) + ")");
  r.require(c.run.local_steps >= 1, "fedcore.local_steps", "need K >= 1");
  r.require(c.run.rounds >= 0, "fedcore.rounds", "need T >= 0");
  r.require(c.run.batch_size >= 1, "fedcore.batch_size", "need batch_size >= 1");
  r.require(c.replicates >= 1, "harness.replicates", "need replicates >= 1");
  r.require(r.integer("harness.seed") >= 0, "harness.seed", "need seed >= 0");
  if (std::abs(algo.beta) >= kBetaSafetyBound && !c.guards.allow_unsafe_beta) {
    std::ostringstream os;
    os << "|beta| = " << std::abs(algo.beta)
       << " violates |beta| < sqrt(6)/24 ~ 0.10206; set harness.allow_unsafe_beta = true to run anyway";
    r.require(false, "fedcore.beta", os.str());
  }
  r.require(cs.dirichlet > 0.0, "partition.dirichlet", "need Dr > 0");
  r.require(algo.params.adam_eps > 0.0, "fedcore.adam_eps", "need adam_eps > 0");
  r.require(algo.params.adam_beta1 >= 0.0 && algo.params.adam_beta1 < 1.0,
            "fedcore.adam_beta1", "need 0 <= adam_beta1 < 1");
  r.require(algo.params.adam_beta2 >= 0.0 && algo.params.adam_beta2 < 1.0,
            "fedcore.adam_beta2", "need 0 <= adam_beta2 < 1");
  r.require(algo.params.dyn_alpha > 0.0, "fedcore.dyn_alpha", "need dyn_alpha > 0");
  r.require(algo.params.cm_alpha >= 0.0 && algo.params.cm_alpha <= 1.0, "fedcore.cm_alpha",
            "need 0 <= cm_alpha <= 1");
  r.require(algo.params.sam_rho >= 0.0, "fedcore.sam_rho", "need sam_rho >= 0");
  r.require(c.run.schedule.offset > 0.0, "fedcore.lr_offset", "need lr_offset > 0");
  r.require(m.record_every >= 1, "metrics.record_every", "need record_every >= 1");
  r.require(m.blowup_factor > 1.0, "metrics.blowup_factor", "need blowup_factor > 1");
  r.require(m.probe_budget >= 100, "metrics.probe_budget", "need probe_budget >= 100");
  r.require(m.gradcheck_points >= 1, "metrics.gradcheck_points", "need gradcheck_points >= 1");
  r.require(m.gradcheck_eps > 0.0, "metrics.gradcheck_eps", "need gradcheck_eps > 0");
  r.require(m.stability_probe_points >= 1, "metrics.stability_probe_points",
            "need stability_probe_points >= 1");
  r.require(c.oracle_steps >= 1, "objectives.oracle_steps", "need oracle_steps >= 1");
  if (c.task == objectives::TaskKind::kQuadratic) {
    r.require(c.quadratic.dim >= 1, "objectives.dim", "need dim >= 1");
    r.require(clients >= 2, "objectives.clients", "quadratic family needs C >= 2");
    r.require(c.quadratic.condition_number >= 1.0, "objectives.condition_number",
              "need condition_number >= 1");
    r.require(c.quadratic.noise_sigma >= 0.0, "objectives.noise_sigma", "need noise_sigma >= 0");
    r.require(c.quadratic.hetero_scale >= 0.0, "objectives.hetero_scale", "need hetero_scale >= 0");
  } else {
    r.require(cs.features >= 1, "objectives.features", "need features >= 1");
    r.require(cs.classes >= 2 && cs.classes <= 64, "objectives.classes", "need 2 <= classes <= 64");
    r.require(cs.samples_per_client >= 1, "objectives.samples_per_client", "need S >= 1");
    r.require(cs.weight_decay >= 0.0, "objectives.weight_decay", "need weight_decay >= 0");
    r.require(cs.heldout_size >= 0, "objectives.heldout_size", "need heldout_size >= 0");
    r.require(cs.noise > 0.0, "objectives.noise", "need noise > 0");
    if (c.task == objectives::TaskKind::kMlp) {
      r.require(cs.hidden >= 1 && cs.hidden <= 32, "objectives.hidden", "need 1 <= hidden <= 32");
    }
  }
  for (int cp : m.stability_checkpoints) {
    r.require(cp >= 0 && cp <= c.run.rounds, "metrics.stability_checkpoints",
              "checkpoint " + std::to_string(cp) + " outside [0, T]");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));

  c.resolved = values;
  for (const auto& k : kSchema) {
    const std::string full = std::string(k.section) + "." + std::string(k.key);
    if (!c.resolved.entries.count(full)) c.resolved.entries[full] = std::string(k.default_value);
  }
  return c;
}

ExperimentConfig parse_config(std::string_view text) {
  return build_config(read_config_text(text));
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  return build_config(read_config_file(path));
}

std::uint64_t replicate_seed(std::uint64_t master, int replicate) {
  return hash_combine(master, static_cast<std::uint64_t>(replicate));
}

std::unique_ptr<objectives::Task> make_task(const ExperimentConfig& config,
                                            std::uint64_t rep_seed) {
  const std::uint64_t seed = config.task_seed ? *config.task_seed
                                              : hash_combine(rep_seed, hash_tag("task"));
  std::unique_ptr<objectives::Task> task;
  switch (config.task) {
    case objectives::TaskKind::kQuadratic: {
      auto q = config.quadratic;
      q.seed = seed;
      task = objectives::make_quadratic_family(q);
      break;
    }
    case objectives::TaskKind::kLogistic: {
      auto cs = config.classification;
      cs.seed = seed;
      task = objectives::make_logistic_family(cs);
      break;
    }
    case objectives::TaskKind::kMlp: {
      auto cs = config.classification;
      cs.seed = seed;
      task = objectives::make_mlp_family(cs);
      break;
    }
  }
  return task;
}

}  // namespace fedsim::harness
