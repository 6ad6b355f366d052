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
#include <memory>
#include <vector>

#include "fedsim/objectives/task.hpp"

namespace fedsim::objectives {

// Dense labelled samples, row-major features.
struct SampleStore {
  int features = 0;
  int classes = 0;
  std::vector<double> x;
  std::vector<int> y;

  int size() const { return static_cast<int>(y.size()); }
  const double* row(int i) const {
    return x.data() + static_cast<std::size_t>(i) * features;
  }
  void append(std::span<const double> features_row, int label);
};

// Class-conditional Gaussian generator: x = mean[y] + N(0, noise^2 I).
struct GaussianMixture {
  int features = 0;
  int classes = 0;
  double noise = 1.0;
  std::vector<double> means;  // classes x features

  // `labels_balanced` draws exactly n / classes per class (remainder spread
  // over the first classes), otherwise labels are uniform.
  SampleStore sample(int n, std::uint64_t seed, bool labels_balanced) const;
};

// Federated classification objective: each client owns a multiset of
// indices into a shared training pool; f_i is the mean per-sample loss on
// that multiset plus an L2 penalty.
class DatasetTask : public Task {
 public:
  double client_loss(int client, std::span<const double> w) const override;
  void client_grad(int client, std::span<const double> w,
                   std::span<double> out) const override;
  double client_loss_grad(int client, std::span<const double> w,
                          std::span<double> out) const override;
  double batch_loss(const Batch& batch,
                    std::span<const double> w) const override;
  void batch_grad(const Batch& batch, std::span<const double> w,
                  std::span<double> out) const override;
  Batch draw_batch(int client, int batch_size, Stream& rng) const override;
  Batch full_batch(int client) const override;

  // Per-sample loss including the L2 term, so the mean over a client's
  // multiset equals f_i.
  virtual double sample_loss(std::span<const double> w, const double* x,
                             int label) const = 0;
  virtual int predict(std::span<const double> w, const double* x) const = 0;

  double mean_loss(std::span<const double> w, const SampleStore& set) const;
  double accuracy(std::span<const double> w, const SampleStore& set) const;

  const SampleStore& pool() const { return *pool_; }
  const SampleStore& heldout() const { return *heldout_; }
  const GaussianMixture& generator() const { return *generator_; }
  const std::vector<int>& client_samples(int client) const {
    return clients_[client];
  }
  double weight_decay() const { return weight_decay_; }
  int features() const { return pool_->features; }
  int classes() const { return pool_->classes; }

  // Union of all client multisets, with multiplicity.
  SampleStore training_set() const;

  // Copy holding a neighbouring dataset: position `position` of `client`
  // is replaced by (x, label).
  std::unique_ptr<DatasetTask> with_replaced_sample(
      int client, int position, std::span<const double> x, int label) const;

 protected:
  DatasetTask(int dim, std::shared_ptr<const SampleStore> pool,
              std::vector<std::vector<int>> clients,
              std::shared_ptr<const SampleStore> heldout,
              std::shared_ptr<const GaussianMixture> generator,
              double weight_decay);
  DatasetTask(const DatasetTask&) = default;

  // Adds scale * d(loss without L2)/dw to grad and returns the loss
  // without the L2 term.
  virtual double accumulate(std::span<const double> w, const double* x,
                            int label, double scale,
                            std::span<double> grad) const = 0;

  double data_loss(std::span<const double> w, const double* x,
                   int label) const;

 private:
  double indexed_loss_grad(int client, std::span<const int> positions,
                           std::span<const double> w,
                           std::span<double>* grad) const;

  std::shared_ptr<const SampleStore> pool_;
  std::vector<std::vector<int>> clients_;
  std::shared_ptr<const SampleStore> heldout_;
  std::shared_ptr<const GaussianMixture> generator_;
  double weight_decay_;
};

// Multinomial logistic regression; w = [W (classes x features), b (classes)].
class LogisticTask final : public DatasetTask {
 public:
  LogisticTask(std::shared_ptr<const SampleStore> pool,
               std::vector<std::vector<int>> clients,
               std::shared_ptr<const SampleStore> heldout,
               std::shared_ptr<const GaussianMixture> generator,
               double weight_decay);

  TaskKind kind() const override { return TaskKind::kLogistic; }
  double sample_loss(std::span<const double> w, const double* x,
                     int label) const override;
  int predict(std::span<const double> w, const double* x) const override;
  std::unique_ptr<Task> clone() const override;

 protected:
  double accumulate(std::span<const double> w, const double* x, int label,
                    double scale, std::span<double> grad) const override;
};

// One hidden tanh layer; w = [W1 (hidden x features), b1, W2 (classes x
// hidden), b2].
class MlpTask final : public DatasetTask {
 public:
  MlpTask(std::shared_ptr<const SampleStore> pool,
          std::vector<std::vector<int>> clients,
          std::shared_ptr<const SampleStore> heldout,
          std::shared_ptr<const GaussianMixture> generator,
          double weight_decay, int hidden);

  TaskKind kind() const override { return TaskKind::kMlp; }
  double sample_loss(std::span<const double> w, const double* x,
                     int label) const override;
  int predict(std::span<const double> w, const double* x) const override;
  ParamVec initial_point(std::uint64_t seed) const override;
  std::unique_ptr<Task> clone() const override;

  int hidden() const { return hidden_; }

 protected:
  double accumulate(std::span<const double> w, const double* x, int label,
                    double scale, std::span<double> grad) const override;

 private:
  void forward(std::span<const double> w, const double* x, double* hidden,
               double* logits) const;

  int hidden_;
};

inline constexpr double kDefaultWeightDecay = 1e-3;
inline constexpr int kMaxHiddenWidth = 32;

struct ClassificationSpec {
  int features = 20;
  int clients = 100;
  int samples_per_client = 50;
  double dirichlet = 0.1;
  int classes = 10;
  std::uint64_t seed = 0;
  // Distance scale of the class means relative to the unit-variance noise.
  double separation = 1.0;
  double noise = 1.0;
  // Global pool size; 0 means clients * samples_per_client.
  int pool_size = 0;
  // 0 means 10 * samples_per_client (at least 1000).
  int heldout_size = 0;
  double weight_decay = kDefaultWeightDecay;
  int hidden = 16;
};

std::unique_ptr<LogisticTask> make_logistic_family(
    const ClassificationSpec& spec);
std::unique_ptr<MlpTask> make_mlp_family(const ClassificationSpec& spec);

}  // namespace fedsim::objectives
