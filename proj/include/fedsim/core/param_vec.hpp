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

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fedsim {

// Flat model parameter vector. Every model (quadratic, softmax, MLP) is
// represented as one of these; the dimension is fixed per experiment.
class ParamVec {
 public:
  ParamVec() = default;
  explicit ParamVec(std::size_t dim, double fill = 0.0) : values_(dim, fill) {}
  ParamVec(std::initializer_list<double> init) : values_(init) {}
  explicit ParamVec(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  auto begin() { return values_.begin(); }
  auto end() { return values_.end(); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  operator std::span<const double>() const { return values_; }

  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const ParamVec&, const ParamVec&) = default;

 private:
  std::vector<double> values_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// Bitwise comparison, distinguishing -0.0 from +0.0 and NaN payloads.
bool bit_identical(std::span<const double> a, std::span<const double> b);

// Throws DimensionError when the two sizes differ.
void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace fedsim
