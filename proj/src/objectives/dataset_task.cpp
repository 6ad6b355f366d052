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

#include "fedsim/objectives/dataset_task.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fedsim/core/error.hpp"
#include "fedsim/partition/partition.hpp"

namespace fedsim::objectives {

void SampleStore::append(std::span<const double> features_row, int label) {
  require_same_dim(features_row.size(), static_cast<std::size_t>(features),
                   "sample");
  x.insert(x.end(), features_row.begin(), features_row.end());
  y.push_back(label);
}

SampleStore GaussianMixture::sample(int n, std::uint64_t seed,
                                    bool labels_balanced) const {
  SampleStore s;
  s.features = features;
  s.classes = classes;
  s.x.resize(static_cast<std::size_t>(n) * features);
  s.y.resize(n);
  const double sd = noise / std::sqrt(static_cast<double>(features));
  // One stream per sample keeps prefixes of a larger draw identical.
  for (int i = 0; i < n; ++i) {
    Stream rng(seed, Domain::kDataGen, static_cast<std::uint32_t>(i));
    const int label = labels_balanced
                          ? i % classes
                          : static_cast<int>(rng.below(classes));
    s.y[i] = label;
    double* row = s.x.data() + static_cast<std::size_t>(i) * features;
    const double* mean = means.data() + static_cast<std::size_t>(label) * features;
    for (int j = 0; j < features; ++j) row[j] = mean[j] + sd * rng.normal();
  }
  return s;
}

DatasetTask::DatasetTask(int dim, std::shared_ptr<const SampleStore> pool,
                         std::vector<std::vector<int>> clients,
                         std::shared_ptr<const SampleStore> heldout,
                         std::shared_ptr<const GaussianMixture> generator,
                         double weight_decay)
    : Task(dim, static_cast<int>(clients.size())),
      pool_(std::move(pool)),
      clients_(std::move(clients)),
      heldout_(std::move(heldout)),
      generator_(std::move(generator)),
      weight_decay_(weight_decay) {
  for (std::size_t i = 0; i < clients_.size(); ++i) {
    if (clients_[i].empty()) {
      throw InvalidArgument("client " + std::to_string(i) + " has no data");
    }
    for (int idx : clients_[i]) {
      if (idx < 0 || idx >= pool_->size()) {
        throw InvalidArgument("client sample index out of range");
      }
    }
  }
}

double DatasetTask::data_loss(std::span<const double> w, const double* x,
                              int label) const {
  return accumulate(w, x, label, 0.0, {});
}

double DatasetTask::indexed_loss_grad(int client,
                                      std::span<const int> positions,
                                      std::span<const double> w,
                                      std::span<double>* grad) const {
  const auto& mine = clients_[client];
  const double scale = 1.0 / static_cast<double>(positions.size());
  if (grad) std::fill(grad->begin(), grad->end(), 0.0);
  double total = 0.0;
  for (int pos : positions) {
    const int idx = mine[pos];
    total += accumulate(w, pool_->row(idx), pool_->y[idx], scale,
                        grad ? *grad : std::span<double>{});
  }
  if (grad) axpy(weight_decay_, w, *grad);
  return total * scale + 0.5 * weight_decay_ * squared_norm(w);
}

double DatasetTask::client_loss(int client, std::span<const double> w) const {
  const Batch b = full_batch(client);
  return indexed_loss_grad(client, b.indices, w, nullptr);
}

void DatasetTask::client_grad(int client, std::span<const double> w,
                              std::span<double> out) const {
  const Batch b = full_batch(client);
  indexed_loss_grad(client, b.indices, w, &out);
}

double DatasetTask::client_loss_grad(int client, std::span<const double> w,
                                     std::span<double> out) const {
  const Batch b = full_batch(client);
  return indexed_loss_grad(client, b.indices, w, &out);
}

double DatasetTask::batch_loss(const Batch& batch,
                               std::span<const double> w) const {
  return indexed_loss_grad(batch.client, batch.indices, w, nullptr);
}

void DatasetTask::batch_grad(const Batch& batch, std::span<const double> w,
                             std::span<double> out) const {
  indexed_loss_grad(batch.client, batch.indices, w, &out);
}

Batch DatasetTask::draw_batch(int client, int batch_size, Stream& rng) const {
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  Batch b;
  b.client = client;
  const auto n = static_cast<std::uint64_t>(clients_[client].size());
  b.indices.resize(batch_size);
  for (int& i : b.indices) i = static_cast<int>(rng.below(n));
  return b;
}

Batch DatasetTask::full_batch(int client) const {
  Batch b;
  b.client = client;
  b.indices.resize(clients_[client].size());
  for (std::size_t i = 0; i < b.indices.size(); ++i) b.indices[i] = static_cast<int>(i);
  return b;
}

double DatasetTask::mean_loss(std::span<const double> w,
                              const SampleStore& set) const {
  if (set.size() == 0) throw InvalidArgument("empty sample set");
  check_dim(w);
  double total = 0.0;
  for (int i = 0; i < set.size(); ++i) total += data_loss(w, set.row(i), set.y[i]);
  return total / set.size() + 0.5 * weight_decay_ * squared_norm(w);
}

double DatasetTask::accuracy(std::span<const double> w,
                             const SampleStore& set) const {
  if (set.size() == 0) throw InvalidArgument("empty sample set");
  int hits = 0;
  for (int i = 0; i < set.size(); ++i) hits += predict(w, set.row(i)) == set.y[i];
  return static_cast<double>(hits) / set.size();
}

SampleStore DatasetTask::training_set() const {
  SampleStore s;
  s.features = pool_->features;
  s.classes = pool_->classes;
  for (const auto& mine : clients_) {
    for (int idx : mine) {
      s.append(std::span<const double>(pool_->row(idx), s.features),
               pool_->y[idx]);
    }
  }
  return s;
}

std::unique_ptr<DatasetTask> DatasetTask::with_replaced_sample(
    int client, int position, std::span<const double> x, int label) const {
  check_client(client);
  if (position < 0 || position >= static_cast<int>(clients_[client].size())) {
    throw InvalidArgument("replacement position out of range");
  }
  if (label < 0 || label >= classes()) throw InvalidArgument("bad label");
  auto pool = std::make_shared<SampleStore>(*pool_);
  pool->append(x, label);
  std::unique_ptr<Task> copy = clone();
  auto* out = static_cast<DatasetTask*>(copy.release());
  out->pool_ = std::move(pool);
  out->clients_[client][position] = out->pool_->size() - 1;
  return std::unique_ptr<DatasetTask>(out);
}

// ---------------------------------------------------------------------------

LogisticTask::LogisticTask(std::shared_ptr<const SampleStore> pool,
                           std::vector<std::vector<int>> clients,
                           std::shared_ptr<const SampleStore> heldout,
                           std::shared_ptr<const GaussianMixture> generator,
                           double weight_decay)
    : DatasetTask(pool->classes * (pool->features + 1), pool,
                  std::move(clients), std::move(heldout), std::move(generator),
                  weight_decay) {}

double LogisticTask::accumulate(std::span<const double> w, const double* x,
                                int label, double scale,
                                std::span<double> grad) const {
  const int p = features();
  const int k = classes();
  const double* bias = w.data() + static_cast<std::size_t>(k) * p;
  double logits[64] = {};
  std::vector<double> big;
  double* z = logits;
  if (k > 64) {
    big.resize(k);
    z = big.data();
  }
  double top = -INFINITY;
  for (int c = 0; c < k; ++c) {
    const double* wc = w.data() + static_cast<std::size_t>(c) * p;
    double s = bias[c];
    for (int j = 0; j < p; ++j) s += wc[j] * x[j];
    z[c] = s;
    top = std::max(top, s);
  }
  double denom = 0.0;
  for (int c = 0; c < k; ++c) denom += std::exp(z[c] - top);
  const double lse = top + std::log(denom);
  const double loss = lse - z[label];
  if (!grad.empty()) {
    double* gbias = grad.data() + static_cast<std::size_t>(k) * p;
    for (int c = 0; c < k; ++c) {
      const double r = scale * (std::exp(z[c] - lse) - (c == label ? 1.0 : 0.0));
      double* gc = grad.data() + static_cast<std::size_t>(c) * p;
      for (int j = 0; j < p; ++j) gc[j] += r * x[j];
      gbias[c] += r;
    }
  }
  return loss;
}

double LogisticTask::sample_loss(std::span<const double> w, const double* x,
                                 int label) const {
  return data_loss(w, x, label) + 0.5 * weight_decay() * squared_norm(w);
}

int LogisticTask::predict(std::span<const double> w, const double* x) const {
  const int p = features();
  const int k = classes();
  const double* bias = w.data() + static_cast<std::size_t>(k) * p;
  int best = 0;
  double top = -INFINITY;
  for (int c = 0; c < k; ++c) {
    const double* wc = w.data() + static_cast<std::size_t>(c) * p;
    double s = bias[c];
    for (int j = 0; j < p; ++j) s += wc[j] * x[j];
    if (s > top) {
      top = s;
      best = c;
    }
  }
  return best;
}

std::unique_ptr<Task> LogisticTask::clone() const {
  return std::make_unique<LogisticTask>(*this);
}

// ---------------------------------------------------------------------------

MlpTask::MlpTask(std::shared_ptr<const SampleStore> pool,
                 std::vector<std::vector<int>> clients,
                 std::shared_ptr<const SampleStore> heldout,
                 std::shared_ptr<const GaussianMixture> generator,
                 double weight_decay, int hidden)
    : DatasetTask(hidden * (pool->features + 1) + pool->classes * (hidden + 1),
                  pool, std::move(clients), std::move(heldout),
                  std::move(generator), weight_decay),
      hidden_(hidden) {
  if (hidden < 1 || hidden > kMaxHiddenWidth) {
    throw InvalidArgument("hidden width must be in [1, 32]");
  }
  if (pool->classes > 64) throw InvalidArgument("mlp supports <= 64 classes");
}

void MlpTask::forward(std::span<const double> w, const double* x, double* h,
                      double* z) const {
  const int p = features();
  const int k = classes();
  const double* w1 = w.data();
  const double* b1 = w1 + static_cast<std::size_t>(hidden_) * p;
  const double* w2 = b1 + hidden_;
  const double* b2 = w2 + static_cast<std::size_t>(k) * hidden_;
  for (int u = 0; u < hidden_; ++u) {
    double s = b1[u];
    const double* row = w1 + static_cast<std::size_t>(u) * p;
    for (int j = 0; j < p; ++j) s += row[j] * x[j];
    h[u] = std::tanh(s);
  }
  for (int c = 0; c < k; ++c) {
    double s = b2[c];
    const double* row = w2 + static_cast<std::size_t>(c) * hidden_;
    for (int u = 0; u < hidden_; ++u) s += row[u] * h[u];
    z[c] = s;
  }
}

double MlpTask::accumulate(std::span<const double> w, const double* x,
                           int label, double scale,
                           std::span<double> grad) const {
  const int p = features();
  const int k = classes();
  double h[kMaxHiddenWidth];
  double z[64];
  forward(w, x, h, z);
  double top = -INFINITY;
  for (int c = 0; c < k; ++c) top = std::max(top, z[c]);
  double denom = 0.0;
  for (int c = 0; c < k; ++c) denom += std::exp(z[c] - top);
  const double lse = top + std::log(denom);
  const double loss = lse - z[label];
  if (grad.empty()) return loss;

  const double* w2 = w.data() + static_cast<std::size_t>(hidden_) * (p + 1);
  double* gw1 = grad.data();
  double* gb1 = gw1 + static_cast<std::size_t>(hidden_) * p;
  double* gw2 = gb1 + hidden_;
  double* gb2 = gw2 + static_cast<std::size_t>(k) * hidden_;
  double dh[kMaxHiddenWidth] = {};
  for (int c = 0; c < k; ++c) {
    const double r = scale * (std::exp(z[c] - lse) - (c == label ? 1.0 : 0.0));
    double* grow = gw2 + static_cast<std::size_t>(c) * hidden_;
    const double* wrow = w2 + static_cast<std::size_t>(c) * hidden_;
    for (int u = 0; u < hidden_; ++u) {
      grow[u] += r * h[u];
      dh[u] += r * wrow[u];
    }
    gb2[c] += r;
  }
  for (int u = 0; u < hidden_; ++u) {
    const double delta = dh[u] * (1.0 - h[u] * h[u]);
    double* grow = gw1 + static_cast<std::size_t>(u) * p;
    for (int j = 0; j < p; ++j) grow[j] += delta * x[j];
    gb1[u] += delta;
  }
  return loss;
}

double MlpTask::sample_loss(std::span<const double> w, const double* x,
                            int label) const {
  return data_loss(w, x, label) + 0.5 * weight_decay() * squared_norm(w);
}

int MlpTask::predict(std::span<const double> w, const double* x) const {
  double h[kMaxHiddenWidth];
  double z[64];
  forward(w, x, h, z);
  return static_cast<int>(std::max_element(z, z + classes()) - z);
}

ParamVec MlpTask::initial_point(std::uint64_t seed) const {
  const int p = features();
  const int k = classes();
  ParamVec w(dim());
  Stream rng(seed, Domain::kInit);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(p));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden_));
  std::size_t at = 0;
  for (int i = 0; i < hidden_ * p; ++i) w[at++] = s1 * rng.normal();
  at += hidden_;
  for (int i = 0; i < k * hidden_; ++i) w[at++] = s2 * rng.normal();
  return w;
}

std::unique_ptr<Task> MlpTask::clone() const {
  return std::make_unique<MlpTask>(*this);
}

// ---------------------------------------------------------------------------

namespace {

struct BuiltData {
  std::shared_ptr<const SampleStore> pool;
  std::shared_ptr<const SampleStore> heldout;
  std::shared_ptr<const GaussianMixture> generator;
  std::vector<std::vector<int>> clients;
};

BuiltData build_classification_data(const ClassificationSpec& spec) {
  if (spec.classes < 2) throw InvalidArgument("classes must be >= 2");
  if (spec.features < 1) throw InvalidArgument("features must be >= 1");
  if (spec.clients < 1) throw InvalidArgument("clients must be >= 1");
  if (spec.samples_per_client < spec.classes) {
    throw InvalidArgument("samples_per_client must be >= classes");
  }
  if (!(spec.dirichlet > 0.0)) throw InvalidArgument("dirichlet must be > 0");
  if (!(spec.weight_decay >= 0.0)) throw InvalidArgument("weight_decay must be >= 0");

  auto gen = std::make_shared<GaussianMixture>();
  gen->features = spec.features;
  gen->classes = spec.classes;
  gen->noise = spec.noise;
  gen->means.resize(static_cast<std::size_t>(spec.classes) * spec.features);
  Stream rng(spec.seed, Domain::kTaskGen);
  const double ms = spec.separation / std::sqrt(static_cast<double>(spec.features));
  for (double& m : gen->means) m = ms * rng.normal();

  const int pool_n = spec.pool_size > 0 ? spec.pool_size
                                        : spec.clients * spec.samples_per_client;
  const int held_n = spec.heldout_size > 0
                         ? spec.heldout_size
                         : std::max(1000, 10 * spec.samples_per_client);
  BuiltData out;
  auto pool = std::make_shared<SampleStore>(
      gen->sample(pool_n, hash_combine(spec.seed, 1), true));
  out.heldout = std::make_shared<SampleStore>(
      gen->sample(held_n, hash_combine(spec.seed, 2), true));
  const partition::Partition part = partition::dirichlet_partition(
      pool->y, spec.clients, spec.dirichlet, spec.samples_per_client,
      hash_combine(spec.seed, 3));
  out.clients = part.assignments;
  out.pool = std::move(pool);
  out.generator = std::move(gen);
  return out;
}

}  // namespace

std::unique_ptr<LogisticTask> make_logistic_family(
    const ClassificationSpec& spec) {
  BuiltData d = build_classification_data(spec);
  return std::make_unique<LogisticTask>(d.pool, std::move(d.clients), d.heldout,
                                        d.generator, spec.weight_decay);
}

std::unique_ptr<MlpTask> make_mlp_family(const ClassificationSpec& spec) {
  BuiltData d = build_classification_data(spec);
  return std::make_unique<MlpTask>(d.pool, std::move(d.clients), d.heldout,
                                   d.generator, spec.weight_decay, spec.hidden);
}

}  // namespace fedsim::objectives
