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

#include "fedsim/objectives/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fedsim/core/error.hpp"

namespace fedsim::objectives {

namespace {

// Cyclic Jacobi eigenvalue iteration for a small symmetric matrix.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a[i * n + i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

// Orthonormal columns from Gaussian draws (modified Gram-Schmidt).
std::vector<double> random_orthogonal(int n, Stream& rng) {
  std::vector<double> q(static_cast<std::size_t>(n) * n);
  for (int col = 0; col < n; ++col) {
    for (;;) {
      std::vector<double> v(n);
      for (double& x : v) x = rng.normal();
      for (int prev = 0; prev < col; ++prev) {
        double d = 0.0;
        for (int r = 0; r < n; ++r) d += q[r * n + prev] * v[r];
        for (int r = 0; r < n; ++r) v[r] -= d * q[r * n + prev];
      }
      const double nv = norm(v);
      if (nv < 1e-8) continue;
      for (int r = 0; r < n; ++r) q[r * n + col] = v[r] / nv;
      break;
    }
  }
  return q;
}

std::vector<double> random_unit(int n, Stream& rng) {
  std::vector<double> v(n);
  double nv = 0.0;
  while (nv < 1e-8) {
    for (double& x : v) x = rng.normal();
    nv = norm(v);
  }
  for (double& x : v) x /= nv;
  return v;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidArgument(std::string("non-finite ") + what);
  }
}

}  // namespace

std::vector<double> cholesky_solve(const std::vector<double>& s,
                                   std::span<const double> r) {
  const int n = static_cast<int>(r.size());
  if (s.size() != static_cast<std::size_t>(n) * n) {
    throw DimensionError("cholesky_solve: matrix size");
  }
  std::vector<double> l(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = s[i * n + j];
      for (int k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (sum <= 0.0) throw NumericError("matrix is not positive definite");
        l[i * n + i] = std::sqrt(sum);
      } else {
        l[i * n + j] = sum / l[j * n + j];
      }
    }
  }
  std::vector<double> y(n), x(n);
  for (int i = 0; i < n; ++i) {
    double sum = r[i];
    for (int k = 0; k < i; ++k) sum -= l[i * n + k] * y[k];
    y[i] = sum / l[i * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double sum = y[i];
    for (int k = i + 1; k < n; ++k) sum -= l[k * n + i] * x[k];
    x[i] = sum / l[i * n + i];
  }
  return x;
}

QuadraticTask::QuadraticTask(std::vector<double> hessian,
                             std::vector<ParamVec> offsets, double noise_sigma)
    : Task(offsets.empty() ? 0 : static_cast<int>(offsets.front().size()),
           static_cast<int>(offsets.size())),
      hessian_(std::move(hessian)),
      offsets_(std::move(offsets)),
      noise_sigma_(noise_sigma) {
  const int d = dim();
  if (hessian_.size() != static_cast<std::size_t>(d) * d) {
    throw DimensionError("hessian must be d x d");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("noise_sigma must be finite and >= 0");
  }
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < i; ++j) {
      if (hessian_[i * d + j] != hessian_[j * d + i]) {
        throw InvalidArgument("hessian must be symmetric");
      }
    }
  }
  mean_offset_ = ParamVec(d);
  for (const auto& b : offsets_) {
    require_same_dim(b.size(), d, "offset");
    if (!all_finite(b)) throw InvalidArgument("non-finite offset");
    for (int j = 0; j < d; ++j) mean_offset_[j] += b[j];
  }
  for (int j = 0; j < d; ++j) mean_offset_[j] /= client_count();

  eigenvalues_ = symmetric_eigenvalues(hessian_, d);
  if (eigenvalues_.front() <= 0.0) {
    throw InvalidArgument("hessian must be positive definite");
  }

  // w* = A^{-1} bbar with one step of iterative refinement.
  std::vector<double> w = cholesky_solve(hessian_, mean_offset_);
  std::vector<double> resid(d);
  hessian_times(w, resid);
  for (int j = 0; j < d; ++j) resid[j] = mean_offset_[j] - resid[j];
  const std::vector<double> corr = cholesky_solve(hessian_, resid);
  for (int j = 0; j < d; ++j) w[j] += corr[j];
  set_exact_optimum(ParamVec(std::move(w)));

  double g = 0.0;
  for (const auto& b : offsets_) {
    g = std::max(g, std::sqrt(squared_distance(b, mean_offset_)));
  }
  TheoryConstants c;
  c.source = TheoryConstants::Source::kAnalytic;
  c.L = eigenvalues_.back();
  c.mu = eigenvalues_.front();
  c.B = 1.0;
  c.G = g;
  c.sigma_l = noise_sigma_;
  set_analytic_constants(c);
}

void QuadraticTask::hessian_times(std::span<const double> w,
                                  std::span<double> out) const {
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    const double* row = hessian_.data() + static_cast<std::size_t>(i) * d;
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += row[j] * w[j];
    out[i] = s;
  }
}

double QuadraticTask::client_loss(int client, std::span<const double> w) const {
  const int d = dim();
  std::vector<double> aw(d);
  hessian_times(w, aw);
  const ParamVec& b = offsets_[client];
  double s = 0.0;
  for (int j = 0; j < d; ++j) s += w[j] * (0.5 * aw[j] - b[j]);
  return s;
}

void QuadraticTask::client_grad(int client, std::span<const double> w,
                                std::span<double> out) const {
  hessian_times(w, out);
  const ParamVec& b = offsets_[client];
  for (int j = 0; j < dim(); ++j) out[j] -= b[j];
}

double QuadraticTask::batch_loss(const Batch& batch,
                                 std::span<const double> w) const {
  return client_loss(batch.client, w);
}

void QuadraticTask::batch_grad(const Batch& batch, std::span<const double> w,
                               std::span<double> out) const {
  client_grad(batch.client, w, out);
  if (!batch.noise.empty()) {
    for (int j = 0; j < dim(); ++j) out[j] += batch.noise[j];
  }
}

Batch QuadraticTask::draw_batch(int client, int batch_size, Stream& rng) const {
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  Batch b;
  b.client = client;
  if (noise_sigma_ > 0.0) {
    const double sd = noise_sigma_ / std::sqrt(static_cast<double>(dim()));
    b.noise.resize(dim());
    for (double& v : b.noise) v = sd * rng.normal();
  }
  return b;
}

Batch QuadraticTask::full_batch(int client) const {
  Batch b;
  b.client = client;
  return b;
}

std::unique_ptr<Task> QuadraticTask::clone() const {
  return std::make_unique<QuadraticTask>(*this);
}

double QuadraticTask::optimal_value() const {
  return -0.5 * dot(mean_offset_, *optimum());
}

std::unique_ptr<QuadraticTask> make_quadratic_family(const QuadraticSpec& spec) {
  require_finite(spec.hetero_scale, "hetero_scale");
  require_finite(spec.condition_number, "condition_number");
  require_finite(spec.noise_sigma, "noise_sigma");
  if (spec.dim < 1) throw InvalidArgument("dim must be >= 1");
  if (spec.clients < 2) throw InvalidArgument("quadratic family needs C >= 2");
  if (spec.condition_number < 1.0) {
    throw InvalidArgument("condition_number must be >= 1");
  }
  if (spec.noise_sigma < 0.0) throw InvalidArgument("noise_sigma must be >= 0");
  const int d = spec.dim;
  const int c = spec.clients;
  Stream rng(spec.seed, Domain::kTaskGen);

  std::vector<double> lambda(d);
  for (int j = 0; j < d; ++j) {
    const double frac = d == 1 ? 0.0 : static_cast<double>(j) / (d - 1);
    lambda[j] = std::pow(spec.condition_number, -frac);
  }
  lambda.front() = 1.0;
  lambda.back() = 1.0 / spec.condition_number;
  if (d == 1) lambda[0] = 1.0;

  const std::vector<double> q = random_orthogonal(d, rng);
  std::vector<double> a(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += q[i * d + k] * lambda[k] * q[j * d + k];
      a[i * d + j] = s;
      a[j * d + i] = s;
    }
  }

  ParamVec bbar(d);
  for (int j = 0; j < d; ++j) bbar[j] = rng.normal();

  // Zero-mean, equal-norm directions: antipodal pairs, plus an equilateral
  // triangle in a random plane when C is odd.
  std::vector<std::vector<double>> u(c, std::vector<double>(d, 0.0));
  int next = 0;
  if (c % 2 == 1) {
    if (d >= 2) {
      const std::vector<double> e1 = random_unit(d, rng);
      std::vector<double> e2 = random_unit(d, rng);
      const double p = dot(e1, e2);
      for (int j = 0; j < d; ++j) e2[j] -= p * e1[j];
      const double n2 = norm(e2);
      for (double& v : e2) v /= n2;
      for (int k = 0; k < 3; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / 3.0;
        for (int j = 0; j < d; ++j) {
          u[k][j] = std::cos(ang) * e1[j] + std::sin(ang) * e2[j];
        }
      }
      next = 3;
    } else {
      // d = 1 with odd C admits no zero-mean equal-norm set; use centred
      // Gaussian draws instead and report the measured maximum.
      double mean = 0.0;
      for (int i = 0; i < c; ++i) mean += (u[i][0] = rng.normal());
      mean /= c;
      double top = 0.0;
      for (int i = 0; i < c; ++i) top = std::max(top, std::abs(u[i][0] -= mean));
      for (int i = 0; i < c; ++i) u[i][0] /= top;
      next = c;
    }
  }
  for (; next + 1 < c; next += 2) {
    u[next] = random_unit(d, rng);
    for (int j = 0; j < d; ++j) u[next + 1][j] = -u[next][j];
  }

  std::vector<ParamVec> offsets(c, ParamVec(d));
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < d; ++j) offsets[i][j] = bbar[j] + spec.hetero_scale * u[i][j];
  }
  return std::make_unique<QuadraticTask>(std::move(a), std::move(offsets),
                                         spec.noise_sigma);
}

}  // namespace fedsim::objectives
