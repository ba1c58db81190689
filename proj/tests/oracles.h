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

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the code paths it checks.
#ifndef FMAR_TESTS_ORACLES_H_
#define FMAR_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "fmar/ingest.h"

namespace fmar::testing {

using Itemsets = std::map<std::vector<ItemId>, std::size_t>;

inline std::vector<ingest::Transaction> make_txns(
    const std::vector<std::vector<ItemId>>& sets) {
  std::vector<ingest::Transaction> out;
  UserId user = 1;
  for (auto items : sets) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    out.push_back({user++, items});
  }
  return out;
}

// Every non-empty subset of the item universe, counted by a direct scan.
inline Itemsets brute_force_itemsets(
    const std::vector<ingest::Transaction>& txns, std::size_t min_support) {
  std::set<ItemId> universe;
  for (const auto& t : txns) universe.insert(t.items.begin(), t.items.end());
  const std::vector<ItemId> items(universe.begin(), universe.end());
  Itemsets out;
  const std::uint64_t limit = std::uint64_t{1} << items.size();
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    std::vector<ItemId> subset;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if ((mask >> i) & 1U) subset.push_back(items[i]);
    }
    std::size_t count = 0;
    for (const auto& t : txns) {
      bool all = true;
      for (ItemId x : subset) {
        if (std::find(t.items.begin(), t.items.end(), x) == t.items.end()) {
          all = false;
          break;
        }
      }
      count += all ? 1 : 0;
    }
    if (count >= min_support) out.emplace(subset, count);
  }
  return out;
}

// Up to `max_items` distinct items 1..max_items, up to `max_txns`
// transactions, each non-empty.
inline std::vector<ingest::Transaction> random_txns(std::mt19937_64& rng,
                                                    std::size_t max_items,
                                                    std::size_t max_txns) {
  std::uniform_int_distribution<std::size_t> n_items(1, max_items);
  std::uniform_int_distribution<std::size_t> n_txns(1, max_txns);
  std::bernoulli_distribution coin(std::uniform_real_distribution<double>(
      0.2, 0.8)(rng));
  const std::size_t items = n_items(rng);
  std::vector<std::vector<ItemId>> sets;
  const std::size_t txns = n_txns(rng);
  while (sets.size() < txns) {
    std::vector<ItemId> s;
    for (ItemId i = 1; i <= items; ++i) {
      if (coin(rng)) s.push_back(i);
    }
    if (!s.empty()) sets.push_back(std::move(s));
  }
  return make_txns(sets);
}

// Exact two-sided rank-sum p by listing every way to assign the pooled
// ranks to the first sample. Tie-free inputs only; sizes up to ~10 each.
inline double exact_rank_sum_p_by_enumeration(const std::vector<double>& a,
                                              const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  auto rank_of = [&](double v) {
    return static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), v) -
                            sorted.begin()) +
           1;
  };
  int observed = 0;
  for (double v : a) observed += rank_of(v);

  const int n = static_cast<int>(pooled.size());
  const int k = static_cast<int>(a.size());
  std::vector<int> pick(n, 0);
  std::fill(pick.begin(), pick.begin() + k, 1);
  std::sort(pick.begin(), pick.end());
  std::size_t total = 0, le = 0, ge = 0;
  do {
    int sum = 0;
    for (int i = 0; i < n; ++i) sum += pick[i] ? i + 1 : 0;
    ++total;
    le += sum <= observed ? 1 : 0;
    ge += sum >= observed ? 1 : 0;
  } while (std::next_permutation(pick.begin(), pick.end()));
  const double tail = static_cast<double>(std::min(le, ge)) /
                      static_cast<double>(total);
  return std::min(1.0, 2.0 * tail);
}

// Direct DCG/IDCG evaluation for an already ranked list of true ratings.
inline double ndcg_of_ranking(const std::vector<double>& ranked_truths,
                              std::size_t k) {
  std::vector<double> ideal = ranked_truths;
  std::sort(ideal.rbegin(), ideal.rend());
  double dcg = 0, idcg = 0;
  for (std::size_t i = 0; i < std::min(k, ranked_truths.size()); ++i) {
    dcg += ranked_truths[i] / std::log2(static_cast<double>(i + 2));
    idcg += ideal[i] / std::log2(static_cast<double>(i + 2));
  }
  return idcg == 0 ? 1.0 : dcg / idcg;
}

}  // namespace fmar::testing

#endif  // FMAR_TESTS_ORACLES_H_
