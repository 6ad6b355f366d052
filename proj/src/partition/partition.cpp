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

#include "fedsim/partition/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include "fedsim/core/error.hpp"
#include "fedsim/core/rng.hpp"

namespace fedsim::partition {

namespace {

int class_count(std::span<const int> labels) {
  int k = 0;
  for (int y : labels) {
    if (y < 0) throw InvalidArgument("negative class id");
    k = std::max(k, y + 1);
  }
  return k;
}

}  // namespace

std::vector<double> dirichlet_draw(int k, double alpha, std::uint64_t seed,
                                   std::uint32_t client) {
  Stream rng(seed, Domain::kPartition, client, 0, 0);
  std::vector<double> logs(k);
  for (int c = 0; c < k; ++c) logs[c] = rng.log_gamma_draw(alpha);
  const double top = *std::max_element(logs.begin(), logs.end());
  double total = 0.0;
  std::vector<double> p(k);
  for (int c = 0; c < k; ++c) {
    p[c] = std::exp(logs[c] - top);
    total += p[c];
  }
  for (double& v : p) v /= total;
  return p;
}

Partition dirichlet_partition(std::span<const int> labels, int clients,
                              double dirichlet, int samples_per_client,
                              std::uint64_t seed) {
  if (!(dirichlet > 0.0) || !std::isfinite(dirichlet)) {
    throw InvalidArgument("dirichlet concentration must be finite and > 0");
  }
  if (clients < 1) throw InvalidArgument("need at least one client");
  if (samples_per_client < 1) {
    throw InvalidArgument("samples_per_client must be >= 1");
  }
  const int k = class_count(labels);
  std::vector<std::vector<int>> by_class(k);
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    by_class[labels[i]].push_back(i);
  }
  for (int c = 0; c < k; ++c) {
    if (by_class[c].empty()) {
      throw InvalidArgument("class " + std::to_string(c) +
                            " has no global samples");
    }
  }

  Partition out;
  out.dirichlet = dirichlet;
  out.samples_per_client = samples_per_client;
  out.assignments.resize(clients);
  for (int i = 0; i < clients; ++i) {
    const std::vector<double> p =
        dirichlet_draw(k, dirichlet, seed, static_cast<std::uint32_t>(i));
    std::vector<double> cdf(k);
    double acc = 0.0;
    for (int c = 0; c < k; ++c) cdf[c] = (acc += p[c]);
    Stream rng(seed, Domain::kPartition, static_cast<std::uint32_t>(i), 1, 0);
    auto& mine = out.assignments[i];
    mine.reserve(samples_per_client);
    for (int s = 0; s < samples_per_client; ++s) {
      const double u = rng.uniform() * acc;
      int c = static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                               cdf.begin());
      c = std::min(c, k - 1);
      const auto& pool = by_class[c];
      mine.push_back(pool[rng.below(pool.size())]);
    }
  }
  return out;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DimensionError("total_variation: size");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

HeterogeneityReport partition_stats(const Partition& partition,
                                    std::span<const int> labels) {
  const int k = class_count(labels);
  HeterogeneityReport r;
  r.global_distribution.assign(k, 0.0);
  for (int y : labels) r.global_distribution[y] += 1.0;
  for (double& v : r.global_distribution) v /= static_cast<double>(labels.size());

  std::vector<char> seen(labels.size(), 0);
  for (const auto& client : partition.assignments) {
    std::vector<int> hist(k, 0);
    for (int idx : client) {
      if (idx < 0 || idx >= static_cast<int>(labels.size())) {
        throw InvalidArgument("partition index out of range");
      }
      ++hist[labels[idx]];
      seen[idx] = 1;
    }
    std::vector<double> p(k, 0.0);
    if (!client.empty()) {
      for (int c = 0; c < k; ++c) p[c] = hist[c] / static_cast<double>(client.size());
    }
    const double tv = total_variation(p, r.global_distribution);
    r.client_tv.push_back(tv);
    r.max_tv = std::max(r.max_tv, tv);
    r.client_histograms.push_back(std::move(hist));
  }
  if (!r.client_tv.empty()) {
    double s = 0.0;
    for (double tv : r.client_tv) s += tv;
    r.mean_tv = s / static_cast<double>(r.client_tv.size());
  }
  r.unsampled = static_cast<int>(std::count(seen.begin(), seen.end(), 0));
  return r;
}

void write_partition_csv(const Partition& partition, std::ostream& out) {
  out << "client_id,sample_index,multiplicity\n";
  for (int i = 0; i < partition.client_count(); ++i) {
    std::map<int, int> counts;
    for (int idx : partition.assignments[i]) ++counts[idx];
    for (const auto& [idx, m] : counts) out << i << ',' << idx << ',' << m << '\n';
  }
}

}  // namespace fedsim::partition
