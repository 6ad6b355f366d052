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

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fedsim/core/error.hpp"
#include "fedsim/partition/partition.hpp"

namespace fedsim::partition {
namespace {

std::vector<int> balanced_labels(int classes, int per_class) {
  std::vector<int> y;
  for (int c = 0; c < classes; ++c) y.insert(y.end(), per_class, c);
  return y;
}

TEST(Dirichlet, DrawIsASimplexPoint) {
  for (double alpha : {1e-3, 0.1, 1.0, 100.0}) {
    const auto p = dirichlet_draw(10, alpha, 1, 0);
    double s = 0.0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12) << "alpha " << alpha;
  }
}

TEST(Dirichlet, DrawMeanIsUniform) {
  std::vector<double> mean(5, 0.0);
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    const auto p = dirichlet_draw(5, 0.5, 2, static_cast<std::uint32_t>(i));
    for (int c = 0; c < 5; ++c) mean[c] += p[c] / n;
  }
  for (double m : mean) EXPECT_NEAR(m, 0.2, 0.02);
}

TEST(Partition, ShapeAndDeterminism) {
  const auto y = balanced_labels(10, 100);
  const Partition a = dirichlet_partition(y, 30, 0.1, 40, 3);
  const Partition b = dirichlet_partition(y, 30, 0.1, 40, 3);
  const Partition c = dirichlet_partition(y, 30, 0.1, 40, 4);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  ASSERT_EQ(a.client_count(), 30);
  for (const auto& mine : a.assignments) {
    EXPECT_EQ(mine.size(), 40u);
    for (int idx : mine) {
      EXPECT_GE(idx, 0);
      EXPECT_LT(idx, static_cast<int>(y.size()));
    }
  }
}

TEST(Partition, ConcentrationControlsSkew) {
  const auto y = balanced_labels(10, 100);
  const auto skewed = partition_stats(dirichlet_partition(y, 50, 0.01, 100, 5), y);
  const auto mild = partition_stats(dirichlet_partition(y, 50, 1.0, 100, 5), y);
  const auto flat = partition_stats(dirichlet_partition(y, 50, 1e6, 100, 5), y);
  EXPECT_GT(skewed.mean_tv, 0.7);
  EXPECT_LT(flat.mean_tv, 0.2);
  EXPECT_GT(skewed.mean_tv, mild.mean_tv);
  EXPECT_GT(mild.mean_tv, flat.mean_tv);
}

TEST(Partition, SingleClientAtHugeConcentrationMatchesGlobal) {
  const auto y = balanced_labels(4, 500);
  const auto stats = partition_stats(dirichlet_partition(y, 1, 1e6, 20000, 6), y);
  EXPECT_LT(stats.max_tv, 0.02);
}

TEST(Partition, StatsCountHistogramsAndUnsampled) {
  const std::vector<int> y{0, 0, 1, 1};
  Partition p;
  p.assignments = {{0, 0, 2}, {3}};
  const auto stats = partition_stats(p, y);
  EXPECT_EQ(stats.client_histograms[0], (std::vector<int>{2, 1}));
  EXPECT_EQ(stats.client_histograms[1], (std::vector<int>{0, 1}));
  EXPECT_EQ(stats.global_distribution, (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(stats.unsampled, 1);
  EXPECT_NEAR(stats.client_tv[0], 1.0 / 6.0, 1e-12);
  EXPECT_NEAR(stats.client_tv[1], 0.5, 1e-12);
  EXPECT_NEAR(stats.max_tv, 0.5, 1e-12);
}

TEST(Partition, TotalVariation) {
  const std::vector<double> p{1.0, 0.0}, q{0.0, 1.0}, r{0.5, 0.5};
  EXPECT_DOUBLE_EQ(total_variation(p, q), 1.0);
  EXPECT_DOUBLE_EQ(total_variation(p, r), 0.5);
  EXPECT_DOUBLE_EQ(total_variation(r, r), 0.0);
  EXPECT_THROW(total_variation(p, std::vector<double>{1.0}), DimensionError);
}

TEST(Partition, RejectsInvalidArguments) {
  const auto y = balanced_labels(3, 5);
  EXPECT_THROW(dirichlet_partition(y, 0, 0.1, 5, 1), InvalidArgument);
  EXPECT_THROW(dirichlet_partition(y, 2, 0.0, 5, 1), InvalidArgument);
  EXPECT_THROW(dirichlet_partition(y, 2, -1.0, 5, 1), InvalidArgument);
  EXPECT_THROW(dirichlet_partition(y, 2, 0.1, 0, 1), InvalidArgument);
  const std::vector<int> gap{0, 0, 2};
  EXPECT_THROW(dirichlet_partition(gap, 2, 0.1, 5, 1), InvalidArgument);
}

TEST(Partition, CsvHasOneRowPerSlot) {
  Partition p;
  p.assignments = {{4, 5}, {6}};
  std::ostringstream out;
  write_partition_csv(p, out);
  const std::string s = out.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}

}  // namespace
}  // namespace fedsim::partition
