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

#include <array>
#include <cstdint>
#include <string_view>

namespace fedsim {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_tag(std::string_view tag);

// Separates stream families that share a seed.
enum class Domain : std::uint32_t {
  kSelection = 1,
  kLocalStep = 2,
  kPartition = 3,
  kDataGen = 4,
  kTaskGen = 5,
  kProbe = 6,
  kInit = 7,
  kOracle = 8,
};

// Counter-based random stream. A stream is identified by
// (seed, domain, a, b, c) -- typically (client, round, iteration) -- and
// never shares state with any other stream, so draws are independent of
// scheduling order.
class Stream {
 public:
  Stream(std::uint64_t seed, Domain domain, std::uint32_t a = 0,
         std::uint32_t b = 0, std::uint32_t c = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  // Uniform integer in [0, n). Unbiased (rejection).
  std::uint64_t below(std::uint64_t n);
  double normal();
  // log of a Gamma(shape, 1) draw. Works for very small shapes where the
  // draw itself underflows.
  double log_gamma_draw(double shape);
  double gamma(double shape);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace fedsim
