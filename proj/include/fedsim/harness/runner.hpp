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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fedsim/fedcore/experiment.hpp"
#include "fedsim/harness/config.hpp"
#include "fedsim/metrics/measures.hpp"

namespace fedsim::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitDiverged = 3,
  kExitOracleFailure = 4,
};

struct ReplicateResult {
  int replicate = 0;
  std::uint64_t seed = 0;
  fed::RunLog log;
  std::optional<metrics::ExcessRiskReport> risk;
  std::string risk_note;  // why risk is absent
  bool oracle_failed = false;
  // Time average of ||grad f||^2 over the last quarter of recorded rounds.
  double tail_grad_norm_sq = 0.0;
  // (1/(T+1)) sum_t Delta^t over recorded rounds.
  double mean_divergence = 0.0;
};

struct RunResult {
  ExperimentConfig config;
  std::vector<ReplicateResult> replicates;
  int exit_code = kExitOk;
};

// Runs every replicate (concurrently across replicates when there are
// several); no file output. Throws ConfigError for invalid runs.
RunResult execute(const ExperimentConfig& config);

// Column order is fixed: replicate, t, eta, train_loss, grad_norm_sq,
// divergence, opt_error, test_loss, test_metric, comm_vectors, grad_evals.
std::string rounds_csv(const RunResult& result);
std::string summary_json(const RunResult& result);
std::string excess_risk_text(const RunResult& result);

// rounds.csv, summary.json, excess_risk.txt and config.resolved into `dir`.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

struct SweepCell {
  std::string value;
  int replicate = 0;
  std::string status;  // ok | diverged | error: ...
  std::optional<double> test_metric;
  std::optional<double> final_divergence;
  std::optional<double> opt_error;
  std::optional<double> gen_gap;
  std::optional<double> final_loss;
};

struct SweepResult {
  std::string axis;
  std::vector<std::string> values;
  std::vector<SweepCell> cells;
  std::string table;  // rendered comparison
};

// Config key behind a sweep axis: beta, K, N or Dr.
std::string sweep_axis_key(const std::string& axis);

// Cross product of `values` x replicates. A failing cell is recorded and the
// sweep continues. Writes each cell under <output>/<axis>=<value>/ when
// `write` is set.
SweepResult sweep(const ConfigValues& base, const std::string& axis,
                  const std::vector<std::string>& values, bool write);

struct GradcheckResult {
  double max_rel_error = 0.0;
  double threshold = 0.0;
  int points = 0;
  bool passed = false;
};

// Threshold by task kind: 1e-7 quadratic, 1e-5 logistic, 1e-4 mlp.
double gradcheck_threshold(objectives::TaskKind kind);
GradcheckResult gradcheck(const ExperimentConfig& config);

struct StabilityReport {
  std::vector<int> checkpoints;
  std::vector<std::vector<double>> epsilon;  // [replicate][checkpoint]
  std::vector<double> median;                // per checkpoint
  double spearman = 0.0;                     // checkpoints vs median
};

StabilityReport stability(const ExperimentConfig& config);

// CLI entry points; they print to `out`/`err` and return an exit code.
int cmd_run(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const std::filesystem::path& config, const std::string& axis,
              const std::vector<std::string>& values, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const std::filesystem::path& config, std::ostream& out, std::ostream& err);
int cmd_stability(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

}  // namespace fedsim::harness
