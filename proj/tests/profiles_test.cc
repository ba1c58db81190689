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

#include "fmar/profiles.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fmar::profiles {
namespace {

using ingest::RatingDataset;
using ingest::RatingRecord;
using mining::AssociationRule;
using mining::ItemSet;

AssociationRule rule(std::vector<ItemId> a, std::vector<ItemId> c) {
  return {ItemSet(std::move(a)), ItemSet(std::move(c)), 0.5, 0.9, 1.5};
}

RatingDataset random_train(std::mt19937_64& rng, UserId users, ItemId items) {
  std::bernoulli_distribution keep(0.5);
  std::uniform_int_distribution<Rating> rating(1, 5);
  std::vector<RatingRecord> records;
  for (UserId u = 1; u <= users; ++u) {
    for (ItemId i = 1; i <= items; ++i) {
      if (keep(rng)) records.push_back({u, i, rating(rng), 0});
    }
  }
  return RatingDataset(std::move(records));
}

std::vector<AssociationRule> random_rules(std::mt19937_64& rng, ItemId items,
                                          std::size_t n) {
  std::uniform_int_distribution<ItemId> item(1, items);
  std::uniform_int_distribution<int> len(1, 3);
  std::vector<AssociationRule> rules;
  while (rules.size() < n) {
    std::vector<ItemId> a, c;
    for (int k = len(rng); k > 0; --k) a.push_back(item(rng));
    for (int k = len(rng); k > 0; --k) c.push_back(item(rng));
    std::sort(a.begin(), a.end());
    bool overlap = false;
    for (ItemId x : c) overlap |= std::binary_search(a.begin(), a.end(), x);
    if (!overlap) rules.push_back(rule(a, c));
  }
  return rules;
}

// Direct restatement of the profile definition.
std::set<ItemId> oracle_profile(const std::vector<AssociationRule>& rules,
                                const RatingDataset& train, UserId user,
                                Rating threshold) {
  std::set<ItemId> liked;
  for (const auto& r : train.records_of(user)) {
    if (r.rating > threshold) liked.insert(r.item_id);
  }
  std::set<ItemId> out;
  for (const auto& r : rules) {
    bool fires = true;
    for (ItemId x : r.antecedent) fires &= liked.contains(x);
    if (fires) out.insert(r.consequent.begin(), r.consequent.end());
  }
  for (ItemId x : liked) out.erase(x);
  return out;
}

TEST(FavorableItems, StrictlyAboveThreshold) {
  const RatingDataset train({{1, 10, 4, 0}, {1, 11, 3, 0}, {2, 10, 2, 0}});
  const auto fav = favorable_items(train, 3);
  EXPECT_EQ(fav.at(1), (std::vector<ItemId>{10}));
  EXPECT_TRUE(fav.at(2).empty());
}

TEST(BuildProfiles, FiresRulesWhoseAntecedentIsLiked) {
  const RatingDataset train({{1, 1, 5, 0}, {1, 2, 4, 0}, {1, 3, 1, 0},
                             {2, 1, 5, 0}, {3, 9, 2, 0}});
  const std::vector<AssociationRule> rules{rule({1}, {3}), rule({1, 2}, {4}),
                                           rule({2}, {1}), rule({5}, {6})};
  const ProfileStore store = build_profiles(rules, train, 3, "test");
  EXPECT_EQ(store.generated_from(), "test");
  EXPECT_EQ(store.find(1)->recommended, (std::set<ItemId>{3, 4}));
  EXPECT_EQ(store.find(2)->recommended, (std::set<ItemId>{3}));
  ASSERT_NE(store.find(3), nullptr);  // every training user has an entry
  EXPECT_TRUE(store.find(3)->recommended.empty());
  EXPECT_EQ(store.find(42), nullptr);
}

TEST(BuildProfiles, MatchesDefinitionProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const RatingDataset train = random_train(rng, 8, 12);
    const auto rules = random_rules(rng, 12, 15);
    const Rating threshold = std::uniform_int_distribution<Rating>(1, 4)(rng);
    const ProfileStore store = build_profiles(rules, train, threshold);
    EXPECT_EQ(store.profiles().size(), train.users().size());
    for (UserId u : train.users()) {
      EXPECT_EQ(store.find(u)->recommended,
                oracle_profile(rules, train, u, threshold));
    }
  }
}

TEST(BuildProfiles, MonotoneInRulesAndExcludesLikedProperty) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const RatingDataset train = random_train(rng, 6, 10);
    auto rules = random_rules(rng, 10, 12);
    const auto fewer = std::vector<AssociationRule>(
        rules.begin(), rules.begin() + static_cast<std::ptrdiff_t>(
                                           rng() % (rules.size() + 1)));
    const ProfileStore small = build_profiles(fewer, train, 3);
    const ProfileStore large = build_profiles(rules, train, 3);
    const auto liked = favorable_items(train, 3);
    for (UserId u : train.users()) {
      const auto& s = small.find(u)->recommended;
      const auto& l = large.find(u)->recommended;
      EXPECT_TRUE(std::includes(l.begin(), l.end(), s.begin(), s.end()));
      for (ItemId x : liked.at(u)) EXPECT_FALSE(l.contains(x));
    }
  }
}

TEST(Shortlist, IntersectsWithProfile) {
  const ProfileStore store({{1, {1, {2, 3, 7}}}}, "");
  const Shortlist s = shortlist(1, {3, 4, 7, 8}, store);
  EXPECT_EQ(s.items, (std::set<ItemId>{3, 7}));
  EXPECT_FALSE(s.fallback);
}

TEST(Shortlist, FallsBackWhenIntersectionEmpty) {
  const ProfileStore store({{1, {1, {2}}}}, "");
  const Shortlist s = shortlist(1, {3, 4}, store);
  EXPECT_EQ(s.items, (std::set<ItemId>{3, 4}));
  EXPECT_TRUE(s.fallback);
}

TEST(Shortlist, UnknownUserFallsBack) {
  const Shortlist s = shortlist(9, {3, 4}, ProfileStore{});
  EXPECT_EQ(s.items, (std::set<ItemId>{3, 4}));
  EXPECT_TRUE(s.fallback);
}

TEST(Shortlist, EmptyCandidatesIsArgumentError) {
  EXPECT_THROW(shortlist(1, {}, ProfileStore{}), ArgumentError);
}

TEST(Shortlist, ContractProperty) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<ItemId> item(1, 20);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<ItemId> profile, candidates;
    for (int k = 0; k < 6; ++k) profile.insert(item(rng));
    for (int k = 1 + static_cast<int>(rng() % 6); k > 0; --k) {
      candidates.insert(item(rng));
    }
    const ProfileStore store({{1, {1, profile}}}, "");
    const Shortlist s = shortlist(1, candidates, store);
    EXPECT_FALSE(s.items.empty());
    EXPECT_TRUE(std::includes(candidates.begin(), candidates.end(),
                              s.items.begin(), s.items.end()));
    std::set<ItemId> both;
    std::set_intersection(candidates.begin(), candidates.end(),
                          profile.begin(), profile.end(),
                          std::inserter(both, both.end()));
    EXPECT_EQ(s.fallback, both.empty());
    EXPECT_EQ(s.items, both.empty() ? candidates : both);
  }
}

TEST(UserSimilarity, PearsonAndCosine) {
  const RatingDataset train({{1, 1, 1, 0}, {1, 2, 2, 0}, {1, 3, 3, 0},
                             {2, 1, 2, 0}, {2, 2, 4, 0}, {2, 3, 5, 0},
                             {3, 1, 5, 0}, {3, 2, 3, 0}, {3, 3, 1, 0},
                             {4, 9, 5, 0}});
  EXPECT_NEAR(user_similarity(1, 3, train, Similarity::kPearson), -1.0, 1e-12);
  const double r12 = user_similarity(1, 2, train, Similarity::kPearson);
  // Means 2 and 11/3: cov 3, var 2 and 14/3.
  EXPECT_NEAR(r12, 3.0 / std::sqrt(2.0 * 14.0 / 3.0), 1e-12);
  EXPECT_NEAR(user_similarity(1, 2, train, Similarity::kCosine),
              (2 + 8 + 15) / std::sqrt(14.0 * 45.0), 1e-12);
  EXPECT_EQ(user_similarity(1, 4, train, Similarity::kPearson), 0.0);
  EXPECT_EQ(user_similarity(1, 4, train, Similarity::kCosine), 0.0);
}

TEST(UserSimilarity, BoundedAndSymmetricProperty) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const RatingDataset train = random_train(rng, 6, 10);
    for (UserId u : train.users()) {
      for (UserId v : train.users()) {
        for (auto m : {Similarity::kPearson, Similarity::kCosine}) {
          const double s = user_similarity(u, v, train, m);
          EXPECT_GE(s, -1.0);
          EXPECT_LE(s, 1.0);
          EXPECT_EQ(s, user_similarity(v, u, train, m));
        }
      }
    }
  }
}

TEST(NeighborExpand, ZeroNeighborsIsIdentity) {
  const RatingDataset train({{1, 1, 5, 0}, {2, 1, 5, 0}});
  const ProfileStore store({{1, {1, {4}}}, {2, {2, {5}}}}, "");
  EXPECT_EQ(neighbor_expand(store, 1, 0, train, Similarity::kPearson, 3),
            *store.find(1));
}

TEST(NeighborExpand, AddsNearestNeighborsProfiles) {
  const RatingDataset train({{1, 1, 1, 0}, {1, 2, 2, 0}, {1, 3, 5, 0},
                             {2, 1, 1, 0}, {2, 2, 2, 0}, {2, 3, 4, 0},
                             {3, 1, 5, 0}, {3, 2, 3, 0}, {3, 3, 1, 0}});
  const ProfileStore store(
      {{1, {1, {7}}}, {2, {2, {3, 8}}}, {3, {3, {9}}}}, "");
  const UserProfile p =
      neighbor_expand(store, 1, 1, train, Similarity::kPearson, 3);
  // Item 3 is liked by user 1 and stays out.
  EXPECT_EQ(p.recommended, (std::set<ItemId>{7, 8}));
  const UserProfile all =
      neighbor_expand(store, 1, 5, train, Similarity::kPearson, 3);
  EXPECT_EQ(all.recommended, (std::set<ItemId>{7, 8, 9}));
}

TEST(ProfileIo, RoundTrip) {
  std::mt19937_64 rng(2);
  const RatingDataset train = random_train(rng, 8, 12);
  const ProfileStore store =
      build_profiles(random_rules(rng, 12, 10), train, 3, "x");
  std::stringstream ss;
  write_profiles(ss, store);
  EXPECT_EQ(read_profiles(ss, "x"), store);

  const auto path =
      std::filesystem::temp_directory_path() / "fmar_profiles_roundtrip.txt";
  save_profiles(path, store);
  std::ifstream in(path);
  EXPECT_EQ(read_profiles(in, "x"), store);
  std::filesystem::remove(path);
}

TEST(ProfileIo, MalformedInput) {
  std::stringstream no_colon("1 2,3\n");
  EXPECT_THROW(read_profiles(no_colon), ParseError);
  std::stringstream bad_id("1: 2,x\n");
  EXPECT_THROW(read_profiles(bad_id), ParseError);
  std::stringstream dup("1: 2\n1: 3\n");
  EXPECT_THROW(read_profiles(dup), ParseError);
}

}  // namespace
}  // namespace fmar::profiles
