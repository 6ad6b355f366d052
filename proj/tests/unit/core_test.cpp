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

#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "fedsim/core/error.hpp"
#include "fedsim/core/param_vec.hpp"
#include "fedsim/core/rng.hpp"

namespace fedsim {
namespace {

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST(Philox, ZeroKeyZeroCounter) {
  const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, PiDigitsVector) {
  const auto out = philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                              {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Stream, SameKeySameSequence) {
  Stream a(42, Domain::kLocalStep, 3, 7, 1);
  Stream b(42, Domain::kLocalStep, 3, 7, 1);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Stream, IndependentCoordinates) {
  std::set<std::uint64_t> firsts;
  firsts.insert(Stream(42, Domain::kLocalStep, 3, 7, 1).next_u64());
  firsts.insert(Stream(43, Domain::kLocalStep, 3, 7, 1).next_u64());
  firsts.insert(Stream(42, Domain::kSelection, 3, 7, 1).next_u64());
  firsts.insert(Stream(42, Domain::kLocalStep, 4, 7, 1).next_u64());
  firsts.insert(Stream(42, Domain::kLocalStep, 3, 8, 1).next_u64());
  firsts.insert(Stream(42, Domain::kLocalStep, 3, 7, 2).next_u64());
  EXPECT_EQ(firsts.size(), 6u);
}

TEST(Stream, UniformRangeAndMoments) {
  Stream rng(1, Domain::kProbe);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 0.005);
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 0.002);
}

TEST(Stream, NormalMoments) {
  Stream rng(2, Domain::kProbe);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(Stream, BelowIsInRangeAndCoversAll) {
  Stream rng(3, Domain::kProbe);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
}

TEST(Stream, GammaMean) {
  for (double shape : {0.1, 1.0, 5.0}) {
    Stream rng(4, Domain::kProbe);
    const int n = 100000;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rng.gamma(shape);
    EXPECT_NEAR(s / n, shape, 0.03 * std::max(1.0, shape)) << "shape " << shape;
  }
}

TEST(Stream, LogGammaDrawFiniteForTinyShapes) {
  Stream rng(5, Domain::kProbe);
  for (int i = 0; i < 1000; ++i) {
    const double lg = rng.log_gamma_draw(1e-6);
    ASSERT_TRUE(std::isfinite(lg));
  }
}

TEST(Hash, CombineIsOrderSensitive) {
  EXPECT_NE(hash_combine(1, 2), hash_combine(2, 1));
  EXPECT_EQ(hash_combine(1, 2), hash_combine(1, 2));
  EXPECT_NE(hash_tag("task"), hash_tag("oracle"));
}

TEST(ParamVec, BasicOps) {
  const ParamVec a{1.0, 2.0, 2.0};
  const ParamVec b{0.0, 1.0, -1.0};
  EXPECT_DOUBLE_EQ(dot(a, b), 0.0);
  EXPECT_DOUBLE_EQ(squared_norm(a), 9.0);
  EXPECT_DOUBLE_EQ(norm(a), 3.0);
  EXPECT_DOUBLE_EQ(squared_distance(a, b), 1.0 + 1.0 + 9.0);
  ParamVec y = b;
  axpy(2.0, a, y.span());
  EXPECT_EQ(y, (ParamVec{2.0, 5.0, 3.0}));
}

TEST(ParamVec, FiniteAndBitIdentity) {
  ParamVec a{0.0, 1.0};
  EXPECT_TRUE(all_finite(a));
  a[1] = std::nan("");
  EXPECT_FALSE(all_finite(a));
  const ParamVec pz{0.0};
  const ParamVec nz{-0.0};
  EXPECT_TRUE(pz == nz);
  EXPECT_FALSE(bit_identical(pz, nz));
}

TEST(ParamVec, DimensionMismatchThrows) {
  const ParamVec a(3), b(4);
  EXPECT_THROW(dot(a, b), DimensionError);
  EXPECT_THROW(require_same_dim(3, 4, "x"), DimensionError);
}

}  // namespace
}  // namespace fedsim
