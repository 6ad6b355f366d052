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

namespace fedsim {

// Relaxed-coefficient bound for the divergence rates: beta < sqrt(6)/24.
inline constexpr double kBetaSafetyBound = 0.10206207261596575;

// Constants of the smoothness / noise / heterogeneity / Lipschitz / PL
// assumptions. For the quadratic family they are exact; for data-driven
// tasks they are empirical lower bounds.
struct TheoryConstants {
  enum class Source { kAnalytic, kEmpirical };

  Source source = Source::kEmpirical;
  double L = 0.0;        // smoothness
  double mu = 0.0;       // PL constant (0 when unknown)
  double G = 0.0;        // heterogeneity offset
  double B = 1.0;        // heterogeneity scale
  double sigma_l = 0.0;  // stochastic gradient std
  double L_G = 0.0;      // Lipschitz constant of f over the probe region

  // Derived quantities, filled by the caller when the run context is known.
  std::optional<double> initial_gap;  // D = f(w0) - f(w*)
  std::optional<double> loss_sup;     // U, recorded as the max observed loss
};

// 1300 b^2 / (1 - 72 b^2) + 17
double kappa1(double beta);
// 1020 b^2 / (1 - 72 b^2) + 13
double kappa2(double beta);
// mu0 / K, the constant of the eta = c / t stability schedule.
double stability_c(double mu0, int local_steps);

}  // namespace fedsim
