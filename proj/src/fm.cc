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

#include "fmar/fm.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

namespace fmar::fm {
namespace {

void check_dimension(const FmModel& model, const FeatureVector& x) {
  if (x.dimension() != model.dimension()) {
    throw ArgumentError("feature dimension " + std::to_string(x.dimension()) +
                        " does not match model dimension " +
                        std::to_string(model.dimension()));
  }
}

double loss(const FmModel& model, const FeatureVector& x, double y) {
  const double e = predict(model, x) - y;
  return e * e;
}

}  // namespace

FeatureVector::FeatureVector(std::vector<Feature> active, std::size_t dimension)
    : active_(std::move(active)), dimension_(dimension) {
  for (std::size_t i = 0; i < active_.size(); ++i) {
    if (active_[i].index >= dimension_) {
      throw ArgumentError("feature index out of range");
    }
    if (i > 0 && active_[i].index <= active_[i - 1].index) {
      throw ArgumentError("feature indices must be strictly ascending");
    }
    if (active_[i].value == 0.0) {
      throw ArgumentError("active feature values must be non-zero");
    }
  }
}

FeatureIndex::FeatureIndex(std::map<UserId, std::size_t> users,
                           std::map<ItemId, std::size_t> items)
    : users_(std::move(users)), items_(std::move(items)) {}

FeatureIndex FeatureIndex::from_dataset(const ingest::RatingDataset& ds) {
  std::map<UserId, std::size_t> users;
  for (UserId u : ds.users()) users.emplace(u, users.size());
  std::map<ItemId, std::size_t> items;
  for (ItemId i : ds.items()) items.emplace(i, items.size());
  return FeatureIndex(std::move(users), std::move(items));
}

FeatureVector encode(UserId user, ItemId item, const FeatureIndex& index) {
  auto u = index.users().find(user);
  if (u == index.users().end()) {
    throw EncodingError("unknown user " + std::to_string(user));
  }
  auto i = index.items().find(item);
  if (i == index.items().end()) {
    throw EncodingError("unknown item " + std::to_string(item));
  }
  return FeatureVector(
      {{u->second, 1.0}, {index.users().size() + i->second, 1.0}},
      index.dimension());
}

FmModel::FmModel(std::size_t dimension, std::size_t k)
    : w_(dimension, 0.0), v_(dimension * k, 0.0), k_(k) {
  if (k == 0) throw ArgumentError("k must be >= 1");
}

double predict(const FmModel& model, const FeatureVector& x) {
  check_dimension(model, x);
  double y = model.w0();
  const auto w = model.w();
  for (const Feature& f : x.active()) y += w[f.index] * f.value;

  double pairwise = 0.0;
  for (std::size_t f = 0; f < model.k(); ++f) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const Feature& a : x.active()) {
      const double t = model.factors(a.index)[f] * a.value;
      sum += t;
      sum_sq += t * t;
    }
    pairwise += sum * sum - sum_sq;
  }
  return y + 0.5 * pairwise;
}

double predict_naive(const FmModel& model, const FeatureVector& x) {
  check_dimension(model, x);
  const auto active = x.active();
  double y = model.w0();
  for (const Feature& f : active) y += model.w()[f.index] * f.value;
  for (std::size_t i = 0; i < active.size(); ++i) {
    const auto vi = model.factors(active[i].index);
    for (std::size_t j = i + 1; j < active.size(); ++j) {
      const auto vj = model.factors(active[j].index);
      const double wij =
          std::inner_product(vi.begin(), vi.end(), vj.begin(), 0.0);
      y += wij * active[i].value * active[j].value;
    }
  }
  return y;
}

std::vector<double> predict_many(const FmModel& model,
                                 std::span<const FeatureVector> xs) {
  std::vector<double> out(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = predict(model, xs[i]);
  return out;
}

std::vector<double> predict_many_ref(const FmModel& model,
                                     std::span<const FeatureVector> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const FeatureVector& x : xs) out.push_back(predict(model, x));
  return out;
}

FmModel train_sgd(const ingest::RatingDataset& train, const FeatureIndex& index,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  if (train.empty()) throw ArgumentError("training set is empty");
  if (cfg.k < 1) throw ArgumentError("k must be >= 1");
  if (cfg.epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (!(cfg.learning_rate > 0.0)) {
    throw ArgumentError("learning_rate must be positive");
  }
  if (!(cfg.l2_reg >= 0.0)) throw ArgumentError("l2_reg must be >= 0");
  if (!(cfg.init_stddev > 0.0)) {
    throw ArgumentError("init_stddev must be positive");
  }

  std::vector<FeatureVector> xs;
  std::vector<double> ys;
  xs.reserve(train.size());
  ys.reserve(train.size());
  for (const ingest::RatingRecord& r : train.records()) {
    xs.push_back(encode(r.user_id, r.item_id, index));
    ys.push_back(r.rating);
  }

  std::mt19937_64 rng(cfg.seed);
  FmModel model(index.dimension(), cfg.k);
  std::normal_distribution<double> init(0.0, cfg.init_stddev);
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    for (double& v : model.factors(i)) v = init(rng);
  }

  const double lr = cfg.learning_rate;
  const double reg = cfg.l2_reg;
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> sums(cfg.k);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sq_error = 0.0;
    for (std::size_t idx : order) {
      const FeatureVector& x = xs[idx];
      const double err = predict(model, x) - ys[idx];
      if (!std::isfinite(err)) {
        throw DivergenceError(epoch, "non-finite training loss");
      }
      sq_error += err * err;
      const double g = 2.0 * err;

      std::fill(sums.begin(), sums.end(), 0.0);
      for (const Feature& a : x.active()) {
        const auto vi = model.factors(a.index);
        for (std::size_t f = 0; f < cfg.k; ++f) sums[f] += vi[f] * a.value;
      }

      model.w0() -= lr * g;
      for (const Feature& a : x.active()) {
        double& wi = model.w()[a.index];
        wi -= lr * (g * a.value + 2.0 * reg * wi);
        auto vi = model.factors(a.index);
        for (std::size_t f = 0; f < cfg.k; ++f) {
          const double grad = a.value * sums[f] - vi[f] * a.value * a.value;
          vi[f] -= lr * (g * grad + 2.0 * reg * vi[f]);
        }
      }
    }
    const double mse = sq_error / static_cast<double>(xs.size());
    if (!std::isfinite(mse)) {
      throw DivergenceError(epoch, "non-finite training loss");
    }
    if (on_epoch) on_epoch(epoch, mse);
  }
  return model;
}

FmModel train_sgd(const ingest::RatingDataset& train, const TrainConfig& cfg) {
  return train_sgd(train, FeatureIndex::from_dataset(train), cfg);
}

Gradient loss_gradient(const FmModel& model, const FeatureVector& x, double y) {
  const double g = 2.0 * (predict(model, x) - y);
  Gradient out;
  out.w0 = g;
  std::vector<double> sums(model.k(), 0.0);
  for (const Feature& a : x.active()) {
    const auto vi = model.factors(a.index);
    for (std::size_t f = 0; f < model.k(); ++f) sums[f] += vi[f] * a.value;
  }
  for (const Feature& a : x.active()) {
    out.w.emplace_back(a.index, g * a.value);
    const auto vi = model.factors(a.index);
    std::vector<double> row(model.k());
    for (std::size_t f = 0; f < model.k(); ++f) {
      row[f] = g * (a.value * sums[f] - vi[f] * a.value * a.value);
    }
    out.v.emplace_back(a.index, std::move(row));
  }
  return out;
}

double gradient_check(const FmModel& model, const FeatureVector& x, double y) {
  constexpr double kStep = 1e-5;
  const Gradient analytic = loss_gradient(model, x, y);
  FmModel probe = model;
  double worst = 0.0;

  auto compare = [&](double& param, double expected) {
    const double saved = param;
    param = saved + kStep;
    const double up = loss(probe, x, y);
    param = saved - kStep;
    const double down = loss(probe, x, y);
    param = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double denom =
        std::max({std::abs(expected), std::abs(numeric), 1e-6});
    worst = std::max(worst, std::abs(expected - numeric) / denom);
  };

  compare(probe.w0(), analytic.w0);
  for (const auto& [i, grad] : analytic.w) compare(probe.w()[i], grad);
  for (const auto& [i, row] : analytic.v) {
    auto vi = probe.factors(i);
    for (std::size_t f = 0; f < row.size(); ++f) compare(vi[f], row[f]);
  }
  return worst;
}

void write_model(std::ostream& out, const FmModel& model) {
  char buf[64];
  auto real = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  };
  out << "fmar-fm 1\n" << model.dimension() << ' ' << model.k() << '\n';
  out << real(model.w0()) << '\n';
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    out << (i ? " " : "") << real(model.w()[i]);
  }
  out << '\n';
  for (std::size_t i = 0; i < model.dimension(); ++i) {
    const auto vi = model.factors(i);
    for (std::size_t f = 0; f < model.k(); ++f) {
      out << (f ? " " : "") << real(vi[f]);
    }
    out << '\n';
  }
}

FmModel read_model(std::istream& in) {
  std::string magic;
  int version = 0;
  std::size_t dimension = 0;
  std::size_t k = 0;
  if (!(in >> magic >> version) || magic != "fmar-fm" || version != 1) {
    throw ParseError(1, "not an fmar-fm v1 model");
  }
  if (!(in >> dimension >> k) || k == 0) {
    throw ParseError(2, "bad model header");
  }
  FmModel model(dimension, k);
  auto read_real = [&](double& v) {
    std::string tok;
    if (!(in >> tok)) throw ParseError(0, "truncated model");
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
      throw ParseError(0, "bad real '" + tok + "'");
    }
  };
  read_real(model.w0());
  for (double& w : model.w()) read_real(w);
  for (std::size_t i = 0; i < dimension; ++i) {
    for (double& v : model.factors(i)) read_real(v);
  }
  return model;
}

void save_model(const std::filesystem::path& path, const FmModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_model(out, model);
  if (!out) throw IoError("write failed for " + path.string());
}

FmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_model(in);
}

}  // namespace fmar::fm
