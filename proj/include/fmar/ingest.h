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

#ifndef FMAR_INGEST_H_
#define FMAR_INGEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "fmar/common.h"

namespace fmar::ingest {

struct RatingRecord {
  UserId user_id = 0;
  ItemId item_id = 0;
  Rating rating = 0;
  std::int64_t timestamp = 0;

  friend bool operator==(const RatingRecord&, const RatingRecord&) = default;
};

// Immutable set of ratings with a per-user index. Construction rejects
// records that break the RatingRecord invariants and duplicate (user, item)
// pairs.
class RatingDataset {
 public:
  RatingDataset() = default;
  explicit RatingDataset(std::vector<RatingRecord> records);

  std::span<const RatingRecord> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  // user_id -> positions in records(), in record order.
  const std::map<UserId, std::vector<std::size_t>>& by_user() const {
    return by_user_;
  }
  bool has_user(UserId user) const { return by_user_.contains(user); }
  std::vector<UserId> users() const;
  // Distinct item ids, ascending.
  std::vector<ItemId> items() const;
  // Records of one user, in record order. Empty when the user is unknown.
  std::vector<RatingRecord> records_of(UserId user) const;

 private:
  std::vector<RatingRecord> records_;
  std::map<UserId, std::vector<std::size_t>> by_user_;
};

struct EvalSplit {
  RatingDataset train;
  std::map<UserId, std::vector<RatingRecord>> test_by_user;
  std::uint64_t seed = 0;
};

struct Transaction {
  UserId user_id = 0;
  std::vector<ItemId> items;  // ascending, non-empty

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

// Reads a tab-separated `user item rating timestamp` file. Blank lines are
// skipped.
RatingDataset load_ratings(const std::filesystem::path& path);
RatingDataset parse_ratings(std::string_view text);

// The `n` users with the most ratings, by descending count then ascending id.
std::vector<UserId> select_eval_users(const RatingDataset& ds, std::size_t n);

// Moves floor(test_frac * count) seeded-random ratings of each listed user
// into the test side.
EvalSplit split_per_user(const RatingDataset& ds, std::span<const UserId> users,
                         double test_frac, std::uint64_t seed);

// One transaction per user holding the items rated strictly above
// `favor_threshold`. Users without such items are omitted.
std::vector<Transaction> extract_transactions(const RatingDataset& train,
                                              Rating favor_threshold);

}  // namespace fmar::ingest

#endif  // FMAR_INGEST_H_
