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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fedsim::partition {

// Per-client multisets of global sample indices. Indices may repeat within
// and across clients (sampling with replacement).
struct Partition {
  std::vector<std::vector<int>> assignments;
  double dirichlet = 0.0;
  int samples_per_client = 0;

  int client_count() const { return static_cast<int>(assignments.size()); }
  friend bool operator==(const Partition&, const Partition&) = default;
};

// For each client: p_i ~ Dirichlet(Dr * 1), then samples_per_client draws of
// (class ~ p_i, uniform sample of that class). Client i uses its own
// counter-based stream, so generation order does not matter.
Partition dirichlet_partition(std::span<const int> labels, int clients,
                              double dirichlet, int samples_per_client,
                              std::uint64_t seed);

// Dirichlet(alpha * 1_k) draw from the given client stream, computed from
// log-Gamma draws so tiny concentrations do not collapse to 0/0.
std::vector<double> dirichlet_draw(int k, double alpha, std::uint64_t seed,
                                   std::uint32_t client);

struct HeterogeneityReport {
  std::vector<std::vector<int>> client_histograms;
  std::vector<double> global_distribution;
  std::vector<double> client_tv;  // TV distance of each client from global
  double mean_tv = 0.0;
  double max_tv = 0.0;
  int unsampled = 0;  // global examples that no client holds
};

double total_variation(std::span<const double> p, std::span<const double> q);

HeterogeneityReport partition_stats(const Partition& partition,
                                    std::span<const int> labels);

// Audit CSV: client_id,sample_index,multiplicity (sorted by both keys).
void write_partition_csv(const Partition& partition, std::ostream& out);

}  // namespace fedsim::partition
