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

#include "fmar/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace fmar::eval {
namespace {

struct Ranked {
  std::vector<double> twice_ranks;  // 2 * midrank, integral
  double tie_term = 0.0;            // sum of t^3 - t over tie groups
};

// Midranks of the pooled sample, first |a| entries belong to a.
Ranked pooled_ranks(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return pooled[x] < pooled[y];
  });

  Ranked out;
  out.twice_ranks.resize(pooled.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // Positions i..j (0-based) share the rank ((i+1) + (j+1)) / 2.
    const double twice = static_cast<double>(i + j + 2);
    for (std::size_t t = i; t <= j; ++t) out.twice_ranks[order[t]] = twice;
    const double t = static_cast<double>(j - i + 1);
    out.tie_term += t * t * t - t;
    i = j + 1;
  }
  return out;
}

void require_samples(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw ArgumentError("rank-sum test needs two non-empty samples");
  }
}

double u_statistic(const Ranked& r, std::size_t n_a) {
  double twice_sum = 0.0;
  for (std::size_t i = 0; i < n_a; ++i) twice_sum += r.twice_ranks[i];
  const double n = static_cast<double>(n_a);
  return twice_sum / 2.0 - n * (n + 1.0) / 2.0;
}

}  // namespace

double mae(std::span<const double> predictions, std::span<const double> truths) {
  if (predictions.empty()) throw ArgumentError("mae of an empty list");
  if (predictions.size() != truths.size()) {
    throw ArgumentError("mae inputs differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    sum += std::abs(predictions[i] - truths[i]);
  }
  return sum / static_cast<double>(predictions.size());
}

double ndcg_at_k(std::span<const Scored> scored, std::size_t k) {
  if (scored.empty()) throw ArgumentError("ndcg of an empty list");
  if (k < 1) throw ArgumentError("ndcg cutoff must be >= 1");
  const std::size_t depth = std::min(k, scored.size());

  std::vector<std::size_t> order(scored.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return scored[x].predicted > scored[y].predicted;
  });
  std::vector<double> ideal;
  ideal.reserve(scored.size());
  for (const Scored& s : scored) ideal.push_back(s.truth);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());

  double dcg = 0.0;
  double idcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    const double discount = std::log2(static_cast<double>(i) + 2.0);
    dcg += scored[order[i]].truth / discount;
    idcg += ideal[i] / discount;
  }
  if (idcg == 0.0) return 1.0;
  return std::clamp(dcg / idcg, 0.0, 1.0);
}

double rank_sum_exact_p(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b);
  const Ranked r = pooled_ranks(a, b);
  // Enumerate subsets of the smaller side; the two-sided p is symmetric.
  const bool a_small = a.size() <= b.size();
  const std::size_t n = a_small ? a.size() : b.size();
  const std::size_t offset = a_small ? 0 : a.size();

  long observed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    observed += std::lround(r.twice_ranks[offset + i]);
  }
  std::vector<long> ranks;
  ranks.reserve(r.twice_ranks.size());
  for (double t : r.twice_ranks) ranks.push_back(std::lround(t));
  // No n-subset can exceed the sum of the n largest ranks.
  std::vector<long> sorted = ranks;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const long max_sum = std::accumulate(sorted.begin(), sorted.begin() + n, 0L);

  // ways[j][s]: number of j-subsets of the ranks seen so far summing to s.
  // Doubles keep large binomials representable; only ratios are used.
  const auto width = static_cast<std::size_t>(max_sum + 1);
  std::vector<double> ways((n + 1) * width, 0.0);
  ways[0] = 1.0;
  long reach = 0;
  for (long rank : ranks) {
    reach = std::min(reach + rank, max_sum);
    for (std::size_t j = n; j >= 1; --j) {
      double* dst = &ways[j * width];
      const double* src = &ways[(j - 1) * width];
      for (long s = reach; s >= rank; --s) dst[s] += src[s - rank];
    }
  }

  const double* dist = &ways[n * width];
  double total = 0.0;
  double below = 0.0;
  double above = 0.0;
  for (long s = 0; s <= max_sum; ++s) {
    total += dist[s];
    if (s <= observed) below += dist[s];
    if (s >= observed) above += dist[s];
  }
  return std::min(1.0, 2.0 * std::min(below, above) / total);
}

double rank_sum_normal_p(std::span<const double> a, std::span<const double> b) {
  require_samples(a, b);
  const Ranked r = pooled_ranks(a, b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  const double u = u_statistic(r, a.size());
  const double mean = na * nb / 2.0;
  const double variance =
      na * nb / 12.0 * ((n + 1.0) - r.tie_term / (n * (n - 1.0)));
  if (!(variance > 0.0)) return 1.0;
  const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

RankSumResult wilcoxon_rank_sum(std::span<const double> a,
                                std::span<const double> b) {
  require_samples(a, b);
  RankSumResult out;
  out.u_a = u_statistic(pooled_ranks(a, b), a.size());
  out.u_b = static_cast<double>(a.size() * b.size()) - out.u_a;
  out.exact = std::min(a.size(), b.size()) <= kExactLimit;
  out.p_two_sided =
      out.exact ? rank_sum_exact_p(a, b) : rank_sum_normal_p(a, b);
  return out;
}

FiveNumber five_number(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("five-number summary of no values");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  return {v.front(), quantile(0.25), quantile(0.5), quantile(0.75), v.back()};
}

}  // namespace fmar::eval
