/*
 * Copyright 2026 The FMAR Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FMAR_FM_H_
#define FMAR_FM_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "fmar/common.h"
#include "fmar/ingest.h"

namespace fmar::fm {

struct Feature {
  std::size_t index = 0;
  double value = 0.0;

  friend bool operator==(const Feature&, const Feature&) = default;
};

// Sparse input row. Indices strictly ascending and below `dimension`;
// values non-zero.
class FeatureVector {
 public:
  FeatureVector() = default;
  // Throws ArgumentError when the invariants do not hold.
  FeatureVector(std::vector<Feature> active, std::size_t dimension);

  std::span<const Feature> active() const { return active_; }
  std::size_t dimension() const { return dimension_; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<Feature> active_;
  std::size_t dimension_ = 0;
};

// One-hot positions for users (first block) and items (second block).
class FeatureIndex {
 public:
  FeatureIndex() = default;
  FeatureIndex(std::map<UserId, std::size_t> users,
               std::map<ItemId, std::size_t> items);
  // Ascending ids of the training data map to consecutive positions.
  static FeatureIndex from_dataset(const ingest::RatingDataset& ds);

  std::size_t dimension() const { return users_.size() + items_.size(); }
  const std::map<UserId, std::size_t>& users() const { return users_; }
  const std::map<ItemId, std::size_t>& items() const { return items_; }
  bool has_user(UserId u) const { return users_.contains(u); }
  bool has_item(ItemId i) const { return items_.contains(i); }

 private:
  std::map<UserId, std::size_t> users_;
  std::map<ItemId, std::size_t> items_;
};

// Throws EncodingError for a user or item missing from the index.
FeatureVector encode(UserId user, ItemId item, const FeatureIndex& index);

// Global bias, linear weights and the n x k factor matrix (row-major).
class FmModel {
 public:
  FmModel() = default;
  FmModel(std::size_t dimension, std::size_t k);

  std::size_t dimension() const { return w_.size(); }
  std::size_t k() const { return k_; }

  double w0() const { return w0_; }
  double& w0() { return w0_; }
  std::span<const double> w() const { return w_; }
  std::span<double> w() { return w_; }
  std::span<const double> factors(std::size_t i) const {
    return {v_.data() + i * k_, k_};
  }
  std::span<double> factors(std::size_t i) { return {v_.data() + i * k_, k_}; }
  std::span<const double> v() const { return v_; }

  friend bool operator==(const FmModel&, const FmModel&) = default;

 private:
  double w0_ = 0.0;
  std::vector<double> w_;
  std::vector<double> v_;
  std::size_t k_ = 0;
};

struct TrainConfig {
  std::size_t k = 8;
  int epochs = 100;
  double learning_rate = 0.01;
  double l2_reg = 0.01;
  double init_stddev = 0.1;
  std::uint64_t seed = 0;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// O(k * |active|) form of the pairwise model.
double predict(const FmModel& model, const FeatureVector& x);
// Explicit double loop over active pairs with w_ij = <v_i, v_j>.
double predict_naive(const FmModel& model, const FeatureVector& x);

// Scores many rows; parallel over rows.
std::vector<double> predict_many(const FmModel& model,
                                 std::span<const FeatureVector> xs);
// Serial reference for predict_many.
std::vector<double> predict_many_ref(const FmModel& model,
                                     std::span<const FeatureVector> xs);

// Called after each epoch with (epoch, mean squared training error).
using EpochCallback = std::function<void(int, double)>;

// SGD on (y_hat - y)^2 + l2_reg * (|w|^2 + |V|^2) restricted to the touched
// parameters. Records are visited in a seeded shuffle each epoch.
FmModel train_sgd(const ingest::RatingDataset& train, const FeatureIndex& index,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});
FmModel train_sgd(const ingest::RatingDataset& train, const TrainConfig& cfg);

// Gradient of (y_hat - y)^2 with respect to w0 and the parameters x touches.
struct Gradient {
  double w0 = 0.0;
  std::vector<std::pair<std::size_t, double>> w;               // (i, dL/dw_i)
  std::vector<std::pair<std::size_t, std::vector<double>>> v;  // (i, dL/dv_i)
};
Gradient loss_gradient(const FmModel& model, const FeatureVector& x, double y);

// Largest relative error between loss_gradient and central differences
// (step 1e-5) over w0, the active w_i and their factor rows. Relative error
// is |a - n| / max(|a|, |n|, 1e-6).
double gradient_check(const FmModel& model, const FeatureVector& x, double y);

// Text format: `fmar-fm 1`, `dimension k`, w0, the n weights, then n rows of
// k factors; reals written with 17 significant digits.
void write_model(std::ostream& out, const FmModel& model);
FmModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const FmModel& model);
FmModel load_model(const std::filesystem::path& path);

}  // namespace fmar::fm

#endif  // FMAR_FM_H_
