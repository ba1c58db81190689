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

#include "fmar/mining.h"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "oracles.h"

namespace fmar::mining {
namespace {

using fmar::testing::brute_force_itemsets;
using fmar::testing::make_txns;
using fmar::testing::random_txns;

std::map<std::vector<ItemId>, std::size_t> as_map(
    const std::vector<FrequentItemset>& fs) {
  std::map<std::vector<ItemId>, std::size_t> out;
  for (const auto& f : fs) out.emplace(f.items.items(), f.support_count);
  return out;
}

TEST(ItemSet, SortsAndDeduplicates) {
  const ItemSet s{3, 1, 3, 2};
  EXPECT_EQ(s.items(), (std::vector<ItemId>{1, 2, 3}));
  EXPECT_THROW(ItemSet(std::vector<ItemId>{}), ArgumentError);
}

TEST(ItemSet, SubsetAndUnion) {
  const std::vector<ItemId> t{1, 2, 5, 9};
  EXPECT_TRUE((ItemSet{2, 9}).is_subset_of(t));
  EXPECT_FALSE((ItemSet{2, 3}).is_subset_of(t));
  EXPECT_EQ((ItemSet{1, 4}).union_with(ItemSet{4, 2}), (ItemSet{1, 2, 4}));
}

TEST(Support, SmallDatabase) {
  const auto txns = make_txns({{1, 2}, {1, 3}, {1, 2, 3}, {2}});
  const Support s1 = support(ItemSet{1}, txns);
  EXPECT_EQ(s1.count, 3u);
  EXPECT_DOUBLE_EQ(s1.fraction, 0.75);
  const Support s12 = support(ItemSet{1, 2}, txns);
  EXPECT_EQ(s12.count, 2u);
  EXPECT_DOUBLE_EQ(s12.fraction, 0.5);
  EXPECT_EQ(support(ItemSet{7}, txns).count, 0u);
}

TEST(Support, EmptyTransactionListIsArgumentError) {
  EXPECT_THROW(support(ItemSet{1}, {}), ArgumentError);
}

TEST(Confidence, AndLiftSmallDatabase) {
  const auto txns = make_txns({{1, 2}, {1, 3}, {1, 2, 3}, {2}});
  EXPECT_DOUBLE_EQ(confidence(ItemSet{1}, ItemSet{2}, txns), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(lift(ItemSet{1}, ItemSet{2}, txns), 8.0 / 9.0);
}

TEST(Confidence, UndefinedWhenAntecedentAbsent) {
  const auto txns = make_txns({{1, 2}});
  EXPECT_THROW(confidence(ItemSet{9}, ItemSet{1}, txns), UndefinedMetricError);
}

TEST(Lift, UndefinedWhenConsequentAbsent) {
  const auto txns = make_txns({{1, 2}});
  EXPECT_THROW(lift(ItemSet{1}, ItemSet{9}, txns), UndefinedMetricError);
}

TEST(Lift, IndependentItemsGiveOne) {
  const auto txns = make_txns({{1, 2}, {1}, {2}, {3}});
  EXPECT_DOUBLE_EQ(lift(ItemSet{1}, ItemSet{2}, txns), 1.0);
}

TEST(Lift, PerfectCoOccurrenceGivesInverseSupport) {
  const auto txns = make_txns({{1, 2}, {1, 2}, {3}, {3}});
  EXPECT_DOUBLE_EQ(lift(ItemSet{1}, ItemSet{2}, txns), 2.0);
}

TEST(CountSupports, ParallelMatchesSerial) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto txns = random_txns(rng, 10, 200);
    std::vector<ItemSet> candidates;
    std::uniform_int_distribution<ItemId> item(1, 10);
    for (int c = 0; c < 500; ++c) candidates.push_back(ItemSet{item(rng), item(rng)});
    EXPECT_EQ(count_supports(candidates, txns),
              count_supports_ref(candidates, txns));
  }
}

TEST(Apriori, SmallDatabase) {
  const auto txns = make_txns({{1, 2}, {1, 3}, {1, 2, 3}, {2, 3}});
  const auto fs = apriori(txns, 2);
  ASSERT_EQ(fs.size(), 6u);
  for (ItemId i : {1u, 2u, 3u}) EXPECT_EQ(as_map(fs).at({i}), 3u);
  EXPECT_EQ(as_map(fs).at({1, 2}), 2u);
  EXPECT_EQ(as_map(fs).at({1, 3}), 2u);
  EXPECT_EQ(as_map(fs).at({2, 3}), 2u);
  EXPECT_FALSE(as_map(fs).contains({1, 2, 3}));
  EXPECT_DOUBLE_EQ(fs.front().support_fraction, 0.75);
}

TEST(Apriori, ThresholdIsInclusive) {
  const auto txns = make_txns({{1, 2}, {1, 2}, {1}});
  const auto fs = apriori(txns, 2);
  EXPECT_EQ(as_map(fs).at({1, 2}), 2u);
}

TEST(Apriori, SortedBySizeThenLexicographic) {
  std::mt19937_64 rng(4);
  const auto fs = apriori(random_txns(rng, 8, 30), 2);
  EXPECT_TRUE(std::is_sorted(fs.begin(), fs.end(), itemset_order));
}

TEST(Apriori, InvalidArguments) {
  const auto txns = make_txns({{1}});
  EXPECT_THROW(apriori(txns, 0), ArgumentError);
  EXPECT_TRUE(apriori({}, 1).empty());
}

TEST(Apriori, MatchesBruteForceProperty) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto txns = random_txns(rng, 8, 30);
    const std::size_t ms = std::uniform_int_distribution<std::size_t>(
        1, txns.size())(rng);
    EXPECT_EQ(as_map(apriori(txns, ms)), brute_force_itemsets(txns, ms))
        << "trial " << trial;
  }
}

TEST(Apriori, DownwardClosureProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto txns = random_txns(rng, 8, 30);
    const auto found = as_map(apriori(txns, 2));
    for (const auto& [items, count] : found) {
      for (std::size_t drop = 0; items.size() > 1 && drop < items.size();
           ++drop) {
        std::vector<ItemId> sub = items;
        sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(drop));
        ASSERT_TRUE(found.contains(sub));
        EXPECT_GE(found.at(sub), count);
      }
    }
  }
}

TEST(DeriveRules, SmallDatabase) {
  const auto txns = make_txns({{1, 2}, {1, 3}, {1, 2, 3}, {2, 3}});
  const auto rules = derive_rules(apriori(txns, 2), txns, 0.6, 0.0);
  ASSERT_EQ(rules.size(), 6u);
  for (const auto& r : rules) {
    EXPECT_DOUBLE_EQ(r.confidence, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.support, 0.5);
    EXPECT_DOUBLE_EQ(r.lift, (2.0 / 3.0) / 0.75);
  }
  EXPECT_EQ(rules.front().antecedent, ItemSet{1});
  EXPECT_EQ(rules.front().consequent, ItemSet{2});
  EXPECT_TRUE(derive_rules(apriori(txns, 2), txns, 0.7, 0.0).empty());
}

TEST(DeriveRules, LiftFilterIsInclusive) {
  const auto txns = make_txns({{1, 2}, {1}, {2}, {3}});
  const auto fs = apriori(txns, 1);
  const auto rules = derive_rules(fs, txns, 0.0, 1.0);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_DOUBLE_EQ(rules[0].lift, 1.0);
}

TEST(DeriveRules, MetricsAgreeWithDirectDefinitionsProperty) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto txns = random_txns(rng, 7, 25);
    const std::size_t ms = std::uniform_int_distribution<std::size_t>(
        1, std::max<std::size_t>(1, txns.size() / 2))(rng);
    const double min_conf =
        std::uniform_real_distribution<double>(0, 1)(rng);
    const double min_lift =
        std::uniform_real_distribution<double>(0, 2)(rng);
    const auto frequents = apriori(txns, ms);
    const auto rules = derive_rules(frequents, txns, min_conf, min_lift);
    // Every rule is well formed and meets the thresholds.
    for (const auto& r : rules) {
      const ItemSet whole = r.antecedent.union_with(r.consequent);
      EXPECT_EQ(whole.size(), r.antecedent.size() + r.consequent.size());
      EXPECT_GE(support(whole, txns).count, ms);
      EXPECT_NEAR(r.confidence, confidence(r.antecedent, r.consequent, txns),
                  1e-12);
      EXPECT_NEAR(r.lift, lift(r.antecedent, r.consequent, txns), 1e-12);
      EXPECT_GE(r.confidence, min_conf);
      EXPECT_GE(r.lift, min_lift);
    }
    // And every qualifying split of a frequent itemset appears.
    std::size_t expected = 0;
    for (const auto& f : frequents) {
      const std::size_t k = f.items.size();
      if (k < 2) continue;
      for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
        std::vector<ItemId> a, c;
        for (std::size_t i = 0; i < k; ++i) {
          ((mask >> i) & 1U ? a : c).push_back(f.items[i]);
        }
        const double conf = confidence(ItemSet(a), ItemSet(c), txns);
        const double lft = lift(ItemSet(a), ItemSet(c), txns);
        if (conf >= min_conf && lft >= min_lift) ++expected;
      }
    }
    EXPECT_EQ(rules.size(), expected);
  }
}

TEST(RuleIo, RoundTripIsExact) {
  std::mt19937_64 rng(8);
  const auto txns = random_txns(rng, 8, 30);
  const auto rules = derive_rules(apriori(txns, 2), txns, 0.0, 0.0);
  ASSERT_FALSE(rules.empty());
  std::stringstream ss;
  write_rules(ss, rules);
  EXPECT_EQ(read_rules(ss), rules);

  const auto path =
      std::filesystem::temp_directory_path() / "fmar_rules_roundtrip.txt";
  save_rules(path, rules);
  EXPECT_EQ(load_rules(path), rules);
  std::filesystem::remove(path);
}

TEST(RuleIo, MalformedInput) {
  std::stringstream missing("1|2|0.5|0.5\n");
  EXPECT_THROW(read_rules(missing), ParseError);
  std::stringstream bad_item("1,x|2|0.5|0.5|1\n");
  EXPECT_THROW(read_rules(bad_item), ParseError);
  std::stringstream bad_real("1|2|half|0.5|1\n");
  EXPECT_THROW(read_rules(bad_real), ParseError);
  EXPECT_THROW(load_rules("/nonexistent/rules.txt"), IoError);
}

}  // namespace
}  // namespace fmar::mining
