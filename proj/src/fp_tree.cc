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

#include "fmar/fp_tree.h"

#include <algorithm>
#include <iterator>
#include <utility>

namespace fmar::mining {
namespace {

void mine_suffix(const FPTree& tree, ItemId item, std::vector<ItemId>& suffix,
                 std::size_t min_support, std::size_t total,
                 std::vector<FrequentItemset>& out) {
  suffix.push_back(item);
  const std::size_t count = tree.header().at(item).total;
  out.push_back({ItemSet(suffix), count,
                 static_cast<double>(count) / static_cast<double>(total)});

  const FPTree conditional =
      FPTree::build_weighted(tree.conditional_pattern_base(item), min_support);
  for (ItemId next : conditional.items_ascending_frequency()) {
    mine_suffix(conditional, next, suffix, min_support, total, out);
  }
  suffix.pop_back();
}

}  // namespace

FPTree::FPTree() : nodes_(1) {}

FPTree FPTree::build(std::span<const Transaction> txns,
                     std::size_t min_support) {
  std::vector<WeightedItems> paths;
  paths.reserve(txns.size());
  for (const Transaction& t : txns) paths.push_back({t.items, 1});
  return build_weighted(paths, min_support);
}

FPTree FPTree::build_weighted(std::span<const WeightedItems> paths,
                              std::size_t min_support) {
  if (min_support < 1) throw ArgumentError("min_support must be >= 1");
  FPTree tree;
  tree.min_support_ = min_support;

  std::map<ItemId, std::size_t> freq;
  for (const WeightedItems& p : paths) {
    for (ItemId item : p.items) freq[item] += p.count;
  }

  std::vector<std::pair<ItemId, std::size_t>> survivors;
  for (const auto& [item, count] : freq) {
    if (count >= min_support) survivors.emplace_back(item, count);
  }
  // Descending frequency, ties by ascending item id (freq is id-ordered).
  std::stable_sort(survivors.begin(), survivors.end(),
                   [](auto& a, auto& b) { return a.second > b.second; });
  for (std::size_t rank = 0; rank < survivors.size(); ++rank) {
    tree.order_.emplace(survivors[rank].first, rank);
    tree.header_.emplace(survivors[rank].first, HeaderEntry{});
  }

  std::map<ItemId, NodeIndex> chain_tail;
  std::vector<ItemId> ordered;
  for (const WeightedItems& p : paths) {
    ordered.clear();
    for (ItemId item : p.items) {
      if (tree.order_.contains(item)) ordered.push_back(item);
    }
    if (ordered.empty() || p.count == 0) continue;
    std::sort(ordered.begin(), ordered.end(), [&](ItemId a, ItemId b) {
      return tree.order_.at(a) < tree.order_.at(b);
    });
    tree.insert(ordered, p.count, chain_tail);
  }
  return tree;
}

void FPTree::insert(std::span<const ItemId> ordered, std::size_t count,
                    std::map<ItemId, NodeIndex>& chain_tail) {
  NodeIndex current = 0;
  for (ItemId item : ordered) {
    auto& children = nodes_[current].children;
    auto it = children.find(item);
    NodeIndex child;
    if (it != children.end()) {
      child = it->second;
    } else {
      child = static_cast<NodeIndex>(nodes_.size());
      children.emplace(item, child);
      Node node;
      node.item = item;
      node.parent = current;
      nodes_.push_back(std::move(node));

      HeaderEntry& entry = header_.at(item);
      auto tail = chain_tail.find(item);
      if (tail == chain_tail.end()) {
        entry.first = child;
        chain_tail.emplace(item, child);
      } else {
        nodes_[tail->second].next_same_item = child;
        tail->second = child;
      }
    }
    nodes_[child].count += count;
    header_.at(item).total += count;
    current = child;
  }
}

std::vector<ItemId> FPTree::items_ascending_frequency() const {
  std::vector<ItemId> items(order_.size());
  for (const auto& [item, rank] : order_) {
    items[order_.size() - 1 - rank] = item;
  }
  return items;
}

std::vector<FPTree::WeightedItems> FPTree::conditional_pattern_base(
    ItemId item) const {
  std::vector<WeightedItems> base;
  auto it = header_.find(item);
  if (it == header_.end()) return base;
  for (NodeIndex n = it->second.first; n != kNone;
       n = nodes_[n].next_same_item) {
    WeightedItems path;
    path.count = nodes_[n].count;
    for (NodeIndex p = nodes_[n].parent; p != 0; p = nodes_[p].parent) {
      path.items.push_back(*nodes_[p].item);
    }
    if (path.items.empty()) continue;
    std::reverse(path.items.begin(), path.items.end());
    base.push_back(std::move(path));
  }
  return base;
}

std::vector<FrequentItemset> mine_fp_tree(const FPTree& tree,
                                          std::size_t min_support,
                                          std::size_t total_transactions) {
  if (min_support < 1) throw ArgumentError("min_support must be >= 1");
  if (tree.empty()) return {};
  if (total_transactions == 0) {
    throw ArgumentError("total_transactions must be positive");
  }

  const std::vector<ItemId> items = tree.items_ascending_frequency();
  std::vector<std::vector<FrequentItemset>> per_item(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::vector<ItemId> suffix;
    mine_suffix(tree, items[i], suffix, min_support, total_transactions,
                per_item[i]);
  }

  std::vector<FrequentItemset> out;
  for (auto& part : per_item) {
    std::move(part.begin(), part.end(), std::back_inserter(out));
  }
  std::sort(out.begin(), out.end(), itemset_order);
  return out;
}

std::vector<FrequentItemset> fp_growth(std::span<const Transaction> txns,
                                       std::size_t min_support) {
  if (txns.empty()) return {};
  const FPTree tree = FPTree::build(txns, min_support);
  return mine_fp_tree(tree, min_support, txns.size());
}

}  // namespace fmar::mining
