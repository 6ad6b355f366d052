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

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fedsim/core/param_vec.hpp"
#include "fedsim/fedcore/experiment.hpp"
#include "fedsim/objectives/dataset_task.hpp"
#include "fedsim/objectives/task.hpp"

namespace fedsim::metrics {

// f(w) - f(w*). Throws MissingOptimum when the task has none.
double optimization_error(const objectives::Task& task,
                          std::span<const double> w);

// Held-out loss minus training loss.
double generalization_gap(const objectives::DatasetTask& task,
                          std::span<const double> w,
                          const objectives::SampleStore& heldout);

// Least-squares slope of log y against log x over points [begin, end).
// end < 0 means the end of the series.
double loglog_slope(std::span<const std::pair<double, double>> series,
                    int begin = 0, int end = -1);

double median(std::vector<double> values);
// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

struct DivergenceSummary {
  double final = 0.0;
  double max = 0.0;
  double tail_mean = 0.0;  // mean over the second half of the records
};

struct ExcessRiskReport {
  double optimization = 0.0;    // E_O
  double generalization = 0.0;  // E_G (0 when population = training objective)
  double excess = 0.0;          // E_E = E_G + E_O
  std::optional<double> stability;
  double max_loss = 0.0;  // observed sup of the training loss
  DivergenceSummary divergence;
};

// Final-round report. Quadratic tasks have no sampling, so E_G = 0.
ExcessRiskReport excess_risk_report(const fed::RunLog& log,
                                    const objectives::Task& task);

// Number of (client, position) slots whose sample differs between a and b.
// Throws when the client layouts differ.
int dataset_difference(const objectives::DatasetTask& a,
                       const objectives::DatasetTask& b);

struct StabilityOptions {
  std::vector<int> checkpoints;  // rounds T' at which to compare (<= T)
  int probe_points = 500;
  std::uint64_t probe_seed = 0;
};

struct StabilityResult {
  std::vector<int> checkpoints;
  std::vector<double> epsilon;  // mean |f(w; z) - f(w~; z)| per checkpoint
};

// Paired runs on neighbouring datasets with identical seeds and start point.
// Requires an inverse_t schedule and datasets differing in at most one slot.
StabilityResult stability_probe(const fed::RunSpec& spec,
                                const objectives::DatasetTask& task,
                                const objectives::DatasetTask& neighbour,
                                const StabilityOptions& opts,
                                const fed::Guards& guards = {});

// Replaces sample `position` of `client` with a fresh draw from the task's
// generator and probes the pair.
StabilityResult stability_probe(const fed::RunSpec& spec,
                                const objectives::DatasetTask& task,
                                int client, int position,
                                const StabilityOptions& opts,
                                const fed::Guards& guards = {});

}  // namespace fedsim::metrics
