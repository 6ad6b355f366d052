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

#include "fedsim/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "fedsim/core/error.hpp"
#include "fedsim/harness/acceptance.hpp"
#include "fedsim/metrics/measures.hpp"

namespace fedsim::harness {

namespace {

using nlohmann::json;

constexpr std::string_view kHeader =
    "replicate,t,eta,train_loss,grad_norm_sq,divergence,opt_error,test_loss,test_metric,"
    "comm_vectors,grad_evals";

struct Row {
  int replicate = 0;
  int t = 0;
  double divergence = 0.0;
  std::optional<double> opt_error;
};

struct LoadedRun {
  std::filesystem::path dir;
  json summary;
  std::vector<Row> rows;
  std::string label;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<LoadedRun> load(const std::filesystem::path& dir, std::vector<std::string>& problems) {
  LoadedRun run;
  run.dir = dir;
  std::ifstream sj(dir / "summary.json");
  if (!sj) {
    problems.push_back((dir / "summary.json").string() + ": missing");
    return std::nullopt;
  }
  try {
    run.summary = json::parse(sj);
    (void)run.summary.at("strategy").get<std::string>();
    (void)run.summary.at("beta").get<double>();
    (void)run.summary.at("replicates").at(0).at("accounting");
  } catch (const std::exception& e) {
    problems.push_back((dir / "summary.json").string() + ": corrupt (" + e.what() + ")");
    return std::nullopt;
  }
  std::ifstream csv(dir / "rounds.csv");
  if (!csv) {
    problems.push_back((dir / "rounds.csv").string() + ": missing");
    return std::nullopt;
  }
  std::string line;
  if (!std::getline(csv, line) || line != kHeader) {
    problems.push_back((dir / "rounds.csv").string() + ": unexpected header");
    return std::nullopt;
  }
  int lineno = 1;
  while (std::getline(csv, line)) {
    ++lineno;
    const auto cells = split(line);
    try {
      if (cells.size() != 11) throw std::runtime_error("wrong column count");
      Row r;
      r.replicate = std::stoi(cells[0]);
      r.t = std::stoi(cells[1]);
      r.divergence = std::stod(cells[5]);
      if (!cells[6].empty()) r.opt_error = std::stod(cells[6]);
      run.rows.push_back(r);
    } catch (const std::exception&) {
      problems.push_back((dir / "rounds.csv").string() + ":" + std::to_string(lineno) + ": corrupt row");
      return std::nullopt;
    }
  }
  const std::string strategy = run.summary["strategy"];
  const double beta = run.summary["beta"];
  run.label = strategy == "fedavg" && beta != 0.0 ? "fedinit" : strategy;
  return run;
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

std::string fmt_json(const json& j) {
  return j.is_number() ? fmt(j.get<double>()) : std::string("-");
}

std::string ratio(double x) { return fmt(x) + "×"; }

// Median over replicates per round of a row quantity.
template <typename Get>
std::vector<std::pair<double, double>> medians(const LoadedRun& run, Get get) {
  std::map<int, std::vector<double>> by_t;
  int reps = 0;
  for (const auto& r : run.rows) {
    reps = std::max(reps, r.replicate + 1);
    if (auto v = get(r)) by_t[r.t].push_back(*v);
  }
  std::vector<std::pair<double, double>> out;
  for (auto& [t, v] : by_t) {
    if (static_cast<int>(v.size()) == reps) out.push_back({static_cast<double>(t), metrics::median(v)});
  }
  return out;
}

std::optional<double> tail_slope(const std::vector<std::pair<double, double>>& s) {
  if (s.empty()) return std::nullopt;
  const double half = s.back().first / 2.0;
  std::vector<std::pair<double, double>> w;
  for (const auto& p : s) {
    if (p.first >= half && p.first > 0.0 && p.second > 0.0) w.push_back(p);
  }
  if (w.size() < 5) return std::nullopt;
  return metrics::loglog_slope(w);
}

struct Slopes {
  std::optional<double> opt_error, divergence, running_average;
};

Slopes slopes(const LoadedRun& run) {
  Slopes s;
  s.opt_error = tail_slope(medians(run, [](const Row& r) { return r.opt_error; }));
  s.divergence = tail_slope(medians(run, [](const Row& r) { return std::optional<double>(r.divergence); }));
  // Running averages need every round.
  std::map<int, std::vector<std::pair<int, double>>> per_rep;
  for (const auto& r : run.rows) per_rep[r.replicate].push_back({r.t, r.divergence});
  bool every_round = !per_rep.empty();
  std::vector<Row> avg_rows;
  for (auto& [rep, v] : per_rep) {
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      every_round &= v[i].first == static_cast<int>(i);
      sum += v[i].second;
      Row row;
      row.replicate = rep;
      row.t = v[i].first;
      row.divergence = sum / (v[i].first + 1);
      avg_rows.push_back(row);
    }
  }
  if (every_round) {
    LoadedRun tmp;
    tmp.rows = std::move(avg_rows);
    s.running_average =
        tail_slope(medians(tmp, [](const Row& r) { return std::optional<double>(r.divergence); }));
  }
  return s;
}

const Criterion* criterion(int id) {
  for (const auto& c : acceptance_criteria()) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string check_line(int id, bool passed, const std::string& detail) {
  const Criterion* c = criterion(id);
  return std::string(passed ? "PASS" : "FAIL") + " [" + std::to_string(id) + "] " +
         (c ? std::string(c->name) : std::string()) + ": " + detail;
}

}  // namespace

Report build_report(const std::vector<std::filesystem::path>& dirs) {
  if (dirs.empty()) throw ConfigError({"report needs at least one run directory"});
  std::vector<std::string> problems;
  std::vector<LoadedRun> runs;
  for (const auto& d : dirs) {
    if (auto r = load(d, problems)) runs.push_back(std::move(*r));
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));

  Report rep;
  std::ostringstream os;
  json out;
  out["runs"] = json::array();

  os << "runs\n";
  os << "dir\tstrategy\tbeta\tN\tK\tT\treplicates\tdiverged\ttest_metric\tdivergence_T\tE_O\tE_G\n";
  for (const auto& r : runs) {
    const auto& s = r.summary;
    int diverged = 0;
    std::vector<double> eo, eg;
    for (const auto& x : s["replicates"]) {
      diverged += x["status"] == "diverged";
      if (x["excess_risk"].is_object()) {
        eo.push_back(x["excess_risk"]["E_O"]);
        eg.push_back(x["excess_risk"]["E_G"]);
      }
    }
    const json med_eo = eo.empty() ? json(nullptr) : json(metrics::median(eo));
    const json med_eg = eg.empty() ? json(nullptr) : json(metrics::median(eg));
    os << r.dir.string() << '\t' << r.label << '\t' << fmt(s["beta"].get<double>()) << '\t'
       << s["participating"] << '\t' << s["local_steps"] << '\t' << s["rounds"] << '\t'
       << s["replicates"].size() << '\t' << diverged << '\t' << fmt_json(s["median"]["test_metric"])
       << '\t' << fmt_json(s["median"]["divergence"]) << '\t' << fmt_json(med_eo) << '\t'
       << fmt_json(med_eg) << '\n';
    const auto sl = slopes(r);
    out["runs"].push_back({{"dir", r.dir.string()},
                           {"label", r.label},
                           {"beta", s["beta"]},
                           {"diverged", diverged},
                           {"median", s["median"]},
                           {"median_E_O", med_eo},
                           {"median_E_G", med_eg},
                           {"slopes",
                            {{"opt_error", sl.opt_error ? json(*sl.opt_error) : json(nullptr)},
                             {"divergence", sl.divergence ? json(*sl.divergence) : json(nullptr)},
                             {"running_average_divergence",
                              sl.running_average ? json(*sl.running_average) : json(nullptr)}}}});
  }

  os << "\ncost accounting (relative to fedavg)\n";
  std::map<std::string, const LoadedRun*> by_label;
  for (const auto& r : runs) by_label.emplace(r.label, &r);
  bool cost_checked = false, cost_ok = true;
  std::string cost_detail;
  for (const auto& [label, r] : by_label) {
    const auto& a = r->summary["replicates"][0]["accounting"];
    const double comm = a["comm_ratio"], grads = a["grad_ratio"], stored = a["storage_ratio"];
    os << label << "\tcommunication ratio " << ratio(comm) << "\tgradient ratio " << ratio(grads)
       << "\tstorage ratio " << ratio(stored) << '\n';
    for (const auto& e : expected_costs()) {
      if (e.strategy != label || a["rounds"].get<int>() == 0) continue;
      cost_checked = true;
      const bool row = comm == e.comm && grads == e.grads && stored == e.stored;
      cost_ok &= row;
      cost_detail += std::string(cost_detail.empty() ? "" : ", ") + label + (row ? " matches" : " differs");
    }
  }
  if (cost_checked) rep.checks.push_back(check_line(12, cost_ok, cost_detail));

  os << "\nrate slopes (log-log, second half, median over replicates)\n";
  os << "dir\topt_error\tdivergence\trunning_average_divergence\n";
  auto opt = [](const std::optional<double>& x) { return x ? fmt(*x) : std::string("n/a"); };
  for (const auto& r : runs) {
    const auto sl = slopes(r);
    os << r.dir.string() << '\t' << opt(sl.opt_error) << '\t' << opt(sl.divergence) << '\t'
       << opt(sl.running_average) << '\n';
    if (r.summary["task"] != "quadratic") continue;
    const std::string sched = r.summary["schedule"];
    const std::string where = r.dir.string();
    if (sched == "log_over_t" && sl.opt_error) {
      rep.checks.push_back(check_line(3, *sl.opt_error >= -1.4 && *sl.opt_error <= -0.6,
                                      where + " slope " + fmt(*sl.opt_error)));
    }
    if (sched == "inverse_sqrt_t" && sl.running_average) {
      rep.checks.push_back(check_line(4, *sl.running_average >= -1.5 && *sl.running_average <= -0.5,
                                      where + " slope " + fmt(*sl.running_average)));
    }
    if (sched == "log_over_t" && sl.divergence) {
      rep.checks.push_back(check_line(5, *sl.divergence >= -2.6 && *sl.divergence <= -1.4,
                                      where + " slope " + fmt(*sl.divergence)));
    }
  }

  // Beta ordering over runs that differ only in beta.
  std::map<std::string, std::map<double, const LoadedRun*>> groups;
  for (const auto& r : runs) {
    if (r.summary["strategy"] != "fedavg") continue;
    json cfg = r.summary["config"];
    cfg.erase("fedcore.beta");
    cfg.erase("fedcore.strategy");
    cfg.erase("harness.output");
    groups[cfg.dump()][r.summary["beta"].get<double>()] = &r;
  }
  for (const auto& [_, g] : groups) {
    auto get = [&](double b, const char* key) -> std::optional<double> {
      auto it = g.find(b);
      if (it == g.end()) return std::nullopt;
      const auto& v = it->second->summary["median"][key];
      return v.is_number() ? std::optional<double>(v.get<double>()) : std::nullopt;
    };
    const auto d0 = get(0.0, "divergence"), d1 = get(0.1, "divergence");
    const auto a0 = get(0.0, "test_metric"), a1 = get(0.1, "test_metric"), an = get(-0.1, "test_metric");
    if (d0 && d1 && a0 && a1 && an) {
      rep.checks.push_back(check_line(6, *d1 < *d0 && *a1 > *a0 && *an < *a0,
                                      "divergence " + fmt(*d1) + " vs " + fmt(*d0) + ", test metric " +
                                          fmt(*an) + " / " + fmt(*a0) + " / " + fmt(*a1)));
    }
  }

  os << "\nacceptance checks\n";
  std::vector<int> seen;
  for (const auto& line : rep.checks) {
    os << line << '\n';
    seen.push_back(std::stoi(line.substr(line.find('[') + 1)));
  }
  for (const auto& c : acceptance_criteria()) {
    if (std::find(seen.begin(), seen.end(), c.id) == seen.end()) {
      os << "---- [" << c.id << "] " << c.name << ": not evaluable from these runs (fedsim acceptance --only "
         << c.id << ")\n";
    }
  }
  out["checks"] = rep.checks;
  rep.text = os.str();
  rep.summary_json = out.dump(2) + "\n";
  return rep;
}

int cmd_report(const std::vector<std::filesystem::path>& dirs,
               const std::filesystem::path& output, std::ostream& out, std::ostream& err) {
  try {
    const Report r = build_report(dirs);
    std::filesystem::create_directories(output);
    std::ofstream(output / "report.txt", std::ios::binary) << r.text;
    std::ofstream(output / "report.json", std::ios::binary) << r.summary_json;
    out << r.text;
    return 0;
  } catch (const ConfigError& e) {
    err << "report error:\n";
    for (const auto& p : e.problems()) err << "  " << p << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "report error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fedsim::harness
