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

#ifndef FMAR_MINING_H_
#define FMAR_MINING_H_

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

#include "fmar/common.h"
#include "fmar/ingest.h"

namespace fmar::mining {

using ingest::Transaction;

// Non-empty, strictly ascending set of item ids.
class ItemSet {
 public:
  ItemSet() = default;
  // Sorts and deduplicates. Throws ArgumentError when empty.
  explicit ItemSet(std::vector<ItemId> items);
  ItemSet(std::initializer_list<ItemId> items)
      : ItemSet(std::vector<ItemId>(items)) {}

  const std::vector<ItemId>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }
  ItemId operator[](std::size_t i) const { return items_[i]; }

  // True when every item of this set occurs in the ascending `sorted` range.
  bool is_subset_of(std::span<const ItemId> sorted) const;
  ItemSet union_with(const ItemSet& other) const;

  friend bool operator==(const ItemSet&, const ItemSet&) = default;
  friend auto operator<=>(const ItemSet&, const ItemSet&) = default;

 private:
  std::vector<ItemId> items_;
};

struct FrequentItemset {
  ItemSet items;
  std::size_t support_count = 0;
  double support_fraction = 0.0;

  friend bool operator==(const FrequentItemset&,
                         const FrequentItemset&) = default;
};

struct AssociationRule {
  ItemSet antecedent;
  ItemSet consequent;
  double support = 0.0;
  double confidence = 0.0;
  double lift = 0.0;

  friend bool operator==(const AssociationRule&,
                         const AssociationRule&) = default;
};

struct Support {
  std::size_t count = 0;
  double fraction = 0.0;
};

Support support(const ItemSet& xs, std::span<const Transaction> txns);
// count(X u Y) / count(X). Throws UndefinedMetricError when X never occurs.
double confidence(const ItemSet& antecedent, const ItemSet& consequent,
                  std::span<const Transaction> txns);
// confidence(X -> Y) / support_fraction(Y). Throws UndefinedMetricError when
// either side never occurs.
double lift(const ItemSet& antecedent, const ItemSet& consequent,
            std::span<const Transaction> txns);

// Number of transactions containing each candidate. Parallel over candidates.
std::vector<std::size_t> count_supports(std::span<const ItemSet> candidates,
                                        std::span<const Transaction> txns);
// Serial reference for count_supports.
std::vector<std::size_t> count_supports_ref(std::span<const ItemSet> candidates,
                                            std::span<const Transaction> txns);

// Orders by (size, lexicographic items).
bool itemset_order(const FrequentItemset& a, const FrequentItemset& b);

// Level-wise mining with the downward-closure prune. Keeps itemsets with
// support_count >= min_support; output sorted by itemset_order.
std::vector<FrequentItemset> apriori(std::span<const Transaction> txns,
                                     std::size_t min_support);

// Every rule A -> F\A over frequent itemsets F of size >= 2 with
// confidence >= min_confidence and lift >= min_lift. Subset counts come from
// `frequents` when present and are recounted over `txns` otherwise.
std::vector<AssociationRule> derive_rules(
    std::span<const FrequentItemset> frequents,
    std::span<const Transaction> txns, double min_confidence, double min_lift);

// `a,b|c|support|confidence|lift`, one rule per line, reals with 17
// significant digits.
void write_rules(std::ostream& out, std::span<const AssociationRule> rules);
std::vector<AssociationRule> read_rules(std::istream& in);
void save_rules(const std::filesystem::path& path,
                std::span<const AssociationRule> rules);
std::vector<AssociationRule> load_rules(const std::filesystem::path& path);

}  // namespace fmar::mining

#endif  // FMAR_MINING_H_
