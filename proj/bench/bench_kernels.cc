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

// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "fmar/fm.h"
#include "fmar/mining.h"

namespace {

using fmar::ItemId;
using fmar::ingest::Transaction;
using fmar::mining::ItemSet;

struct SupportFixture {
  std::vector<Transaction> txns;
  std::vector<ItemSet> candidates;
};

// Roughly MovieLens-shaped: ~900 baskets over ~1600 items, popular items
// much more frequent than the tail.
const SupportFixture& support_fixture() {
  static const SupportFixture f = [] {
    SupportFixture out;
    std::mt19937_64 rng(1);
    std::geometric_distribution<ItemId> item(0.01);
    for (fmar::UserId u = 1; u <= 900; ++u) {
      std::vector<ItemId> items;
      for (int k = 0; k < 60; ++k) items.push_back(1 + item(rng) % 1600);
      std::sort(items.begin(), items.end());
      items.erase(std::unique(items.begin(), items.end()), items.end());
      out.txns.push_back({u, items});
    }
    std::uniform_int_distribution<ItemId> popular(1, 150);
    for (int c = 0; c < 8000; ++c) {
      out.candidates.push_back(ItemSet{popular(rng), popular(rng), popular(rng)});
    }
    return out;
  }();
  return f;
}

void BM_CountSupportsSerial(benchmark::State& state) {
  const auto& f = support_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fmar::mining::count_supports_ref(f.candidates, f.txns));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.candidates.size()));
}
BENCHMARK(BM_CountSupportsSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_CountSupportsParallel(benchmark::State& state) {
  const auto& f = support_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fmar::mining::count_supports(f.candidates, f.txns));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.candidates.size()));
}
BENCHMARK(BM_CountSupportsParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

struct PredictFixture {
  fmar::fm::FmModel model;
  std::vector<fmar::fm::FeatureVector> xs;
};

// One-hot user/item pairs, the shape the evaluation scores.
const PredictFixture& predict_fixture() {
  static const PredictFixture f = [] {
    PredictFixture out;
    constexpr std::size_t kUsers = 943, kItems = 1682, kFactors = 8;
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 0.1);
    out.model = fmar::fm::FmModel(kUsers + kItems, kFactors);
    for (double& w : out.model.w()) w = g(rng);
    for (std::size_t i = 0; i < out.model.dimension(); ++i) {
      for (double& v : out.model.factors(i)) v = g(rng);
    }
    std::uniform_int_distribution<std::size_t> user(0, kUsers - 1);
    std::uniform_int_distribution<std::size_t> item(0, kItems - 1);
    for (int n = 0; n < 200000; ++n) {
      out.xs.emplace_back(
          std::vector<fmar::fm::Feature>{{user(rng), 1.0},
                                         {kUsers + item(rng), 1.0}},
          kUsers + kItems);
    }
    return out;
  }();
  return f;
}

void BM_PredictManySerial(benchmark::State& state) {
  const auto& f = predict_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fmar::fm::predict_many_ref(f.model, f.xs));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.xs.size()));
}
BENCHMARK(BM_PredictManySerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_PredictManyParallel(benchmark::State& state) {
  const auto& f = predict_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(fmar::fm::predict_many(f.model, f.xs));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(f.xs.size()));
}
BENCHMARK(BM_PredictManyParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
