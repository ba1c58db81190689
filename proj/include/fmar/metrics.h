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

#ifndef FMAR_METRICS_H_
#define FMAR_METRICS_H_

#include <cstddef>
#include <span>
#include <utility>

#include "fmar/common.h"

namespace fmar::eval {

// Mean absolute error. Throws ArgumentError on empty or mismatched inputs.
double mae(std::span<const double> predictions, std::span<const double> truths);

struct Scored {
  double predicted = 0.0;
  double truth = 0.0;
};

// Linear-gain NDCG over the top min(k, n) positions with a log2(i + 1)
// discount. Predictions are ranked descending, ties keep input order. Returns
// 1 when the ideal DCG is 0.
double ndcg_at_k(std::span<const Scored> scored, std::size_t k);

struct RankSumResult {
  double u_a = 0.0;  // Mann-Whitney U of the first sample
  double u_b = 0.0;  // |a| * |b| - u_a
  double p_two_sided = 1.0;
  bool exact = false;
};

// Exact two-sided p of the rank-sum statistic, enumerating the permutation
// distribution of pooled midranks. Handles ties.
double rank_sum_exact_p(std::span<const double> a, std::span<const double> b);
// Normal approximation with tie-corrected variance and a 0.5 continuity
// correction.
double rank_sum_normal_p(std::span<const double> a, std::span<const double> b);

// Wilcoxon rank-sum test. Uses the exact distribution when either sample has
// at most kExactLimit values, the normal approximation otherwise.
inline constexpr std::size_t kExactLimit = 8;
RankSumResult wilcoxon_rank_sum(std::span<const double> a,
                                std::span<const double> b);

struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

// Quartiles by linear interpolation between order statistics.
FiveNumber five_number(std::span<const double> values);

}  // namespace fmar::eval

#endif  // FMAR_METRICS_H_
