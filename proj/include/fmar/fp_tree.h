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

#ifndef FMAR_FP_TREE_H_
#define FMAR_FP_TREE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "fmar/common.h"
#include "fmar/mining.h"

namespace fmar::mining {

// Prefix tree of frequency-ordered transactions. Nodes live in an arena and
// refer to each other by index; index 0 is the root.
class FPTree {
 public:
  using NodeIndex = std::uint32_t;
  static constexpr NodeIndex kNone = ~NodeIndex{0};

  struct Node {
    std::optional<ItemId> item;  // empty for the root
    std::size_t count = 0;
    NodeIndex parent = kNone;
    std::map<ItemId, NodeIndex> children;
    NodeIndex next_same_item = kNone;
  };

  struct HeaderEntry {
    std::size_t total = 0;
    NodeIndex first = kNone;
  };

  // A transaction, or a conditional prefix path, with a multiplicity.
  struct WeightedItems {
    std::vector<ItemId> items;
    std::size_t count = 1;
  };

  static FPTree build(std::span<const Transaction> txns, std::size_t min_support);
  static FPTree build_weighted(std::span<const WeightedItems> paths,
                               std::size_t min_support);

  const Node& root() const { return nodes_.front(); }
  const Node& node(NodeIndex i) const { return nodes_[i]; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::map<ItemId, HeaderEntry>& header() const { return header_; }
  // Rank 0 is the most frequent surviving item.
  const std::map<ItemId, std::size_t>& item_order() const { return order_; }
  std::size_t min_support() const { return min_support_; }
  bool empty() const { return nodes_.size() == 1; }

  // Header items from least to most frequent (reverse insertion order).
  std::vector<ItemId> items_ascending_frequency() const;
  // Prefix paths ending just above each node of `item`'s chain, each weighted
  // by that node's count.
  std::vector<WeightedItems> conditional_pattern_base(ItemId item) const;

 private:
  FPTree();
  void insert(std::span<const ItemId> ordered, std::size_t count,
              std::map<ItemId, NodeIndex>& chain_tail);

  std::vector<Node> nodes_;
  std::map<ItemId, HeaderEntry> header_;
  std::map<ItemId, std::size_t> order_;
  std::size_t min_support_ = 1;
};

// Recursive conditional-tree mining. Set-equal to apriori on the same
// transactions and threshold; sorted by itemset_order. The top-level header
// items are mined in parallel.
std::vector<FrequentItemset> mine_fp_tree(const FPTree& tree,
                                          std::size_t min_support,
                                          std::size_t total_transactions);

// build + mine in one call.
std::vector<FrequentItemset> fp_growth(std::span<const Transaction> txns,
                                       std::size_t min_support);

}  // namespace fmar::mining

#endif  // FMAR_FP_TREE_H_
