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

// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exits non-zero if any criterion fails.

#include <cstdio>

#include "fedsim/core/execution.hpp"
#include "fedsim/harness/acceptance.hpp"

int main() {
  fedsim::apply_worker_override();
  int failed = 0;
  for (const auto& c : fedsim::harness::acceptance_criteria()) {
    const auto r = fedsim::harness::run_criterion(c);
    std::printf("%s [%2d] %s: %s (%.1f s, limit %.0f s)\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str(), r.seconds, c.time_limit_seconds);
    std::fflush(stdout);
    failed += !r.passed;
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(fedsim::harness::acceptance_criteria().size()) - failed,
              fedsim::harness::acceptance_criteria().size());
  return failed == 0 ? 0 : 1;
}
