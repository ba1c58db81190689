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

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>

namespace fmar::mining {
namespace {

bool contains_all(std::span<const ItemId> sorted_txn, const ItemSet& xs) {
  return std::includes(sorted_txn.begin(), sorted_txn.end(), xs.begin(),
                       xs.end());
}

std::size_t count_containing(const ItemSet& xs,
                             std::span<const Transaction> txns) {
  std::size_t n = 0;
  for (const Transaction& t : txns) n += contains_all(t.items, xs) ? 1 : 0;
  return n;
}

double fraction(std::size_t count, std::size_t total) {
  return static_cast<double>(count) / static_cast<double>(total);
}

// Joins k-itemsets sharing their first k-1 items, then drops any candidate
// with an infrequent k-subset.
std::vector<ItemSet> next_candidates(const std::vector<ItemSet>& level) {
  std::set<std::vector<ItemId>> frequent;
  for (const ItemSet& s : level) frequent.insert(s.items());

  std::vector<ItemSet> out;
  for (std::size_t i = 0; i < level.size(); ++i) {
    const auto& a = level[i].items();
    for (std::size_t j = i + 1; j < level.size(); ++j) {
      const auto& b = level[j].items();
      if (!std::equal(a.begin(), a.end() - 1, b.begin(), b.end() - 1)) break;
      std::vector<ItemId> joined = a;
      joined.push_back(b.back());

      bool all_frequent = true;
      std::vector<ItemId> sub(joined.size() - 1);
      for (std::size_t drop = 0; drop + 2 < joined.size() && all_frequent;
           ++drop) {
        std::size_t w = 0;
        for (std::size_t k = 0; k < joined.size(); ++k) {
          if (k != drop) sub[w++] = joined[k];
        }
        all_frequent = frequent.contains(sub);
      }
      if (all_frequent) out.emplace_back(std::move(joined));
    }
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_items(std::ostream& out, const ItemSet& s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out << ',';
    out << s[i];
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = s.find(sep, start);
    if (p == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, p - start));
    start = p + 1;
  }
}

ItemSet parse_items(std::string_view field, std::size_t line_no) {
  std::vector<ItemId> items;
  for (std::string_view tok : split(field, ',')) {
    ItemId id = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(line_no, "bad item id '" + std::string(tok) + "'");
    }
    items.push_back(id);
  }
  return ItemSet(std::move(items));
}

double parse_real(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() ||
      ptr != field.data() + field.size()) {
    throw ParseError(line_no, "bad real '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

ItemSet::ItemSet(std::vector<ItemId> items) : items_(std::move(items)) {
  if (items_.empty()) throw ArgumentError("itemset must be non-empty");
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

bool ItemSet::is_subset_of(std::span<const ItemId> sorted) const {
  return std::includes(sorted.begin(), sorted.end(), items_.begin(),
                       items_.end());
}

ItemSet ItemSet::union_with(const ItemSet& other) const {
  std::vector<ItemId> out;
  out.reserve(items_.size() + other.items_.size());
  std::set_union(items_.begin(), items_.end(), other.items_.begin(),
                 other.items_.end(), std::back_inserter(out));
  return ItemSet(std::move(out));
}

Support support(const ItemSet& xs, std::span<const Transaction> txns) {
  if (txns.empty()) throw ArgumentError("support over an empty transaction list");
  const std::size_t n = count_containing(xs, txns);
  return {n, fraction(n, txns.size())};
}

double confidence(const ItemSet& antecedent, const ItemSet& consequent,
                  std::span<const Transaction> txns) {
  const std::size_t base = count_containing(antecedent, txns);
  if (base == 0) {
    throw UndefinedMetricError("confidence undefined: antecedent never occurs");
  }
  const std::size_t both =
      count_containing(antecedent.union_with(consequent), txns);
  return fraction(both, base);
}

double lift(const ItemSet& antecedent, const ItemSet& consequent,
            std::span<const Transaction> txns) {
  const std::size_t cons = txns.empty() ? 0 : count_containing(consequent, txns);
  if (cons == 0) {
    throw UndefinedMetricError("lift undefined: consequent never occurs");
  }
  return confidence(antecedent, consequent, txns) / fraction(cons, txns.size());
}

std::vector<std::size_t> count_supports(std::span<const ItemSet> candidates,
                                        std::span<const Transaction> txns) {
  std::vector<std::size_t> counts(candidates.size(), 0);
  const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    counts[c] = count_containing(candidates[c], txns);
  }
  return counts;
}

std::vector<std::size_t> count_supports_ref(std::span<const ItemSet> candidates,
                                            std::span<const Transaction> txns) {
  std::vector<std::size_t> counts;
  counts.reserve(candidates.size());
  for (const ItemSet& c : candidates) {
    counts.push_back(count_containing(c, txns));
  }
  return counts;
}

bool itemset_order(const FrequentItemset& a, const FrequentItemset& b) {
  if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
  return a.items < b.items;
}

std::vector<FrequentItemset> apriori(std::span<const Transaction> txns,
                                     std::size_t min_support) {
  if (min_support < 1) throw ArgumentError("min_support must be >= 1");
  std::vector<FrequentItemset> out;
  if (txns.empty()) return out;

  std::map<ItemId, std::size_t> singles;
  for (const Transaction& t : txns) {
    for (ItemId item : t.items) ++singles[item];
  }
  std::vector<ItemSet> level;
  for (const auto& [item, count] : singles) {
    if (count >= min_support) {
      level.push_back(ItemSet{item});
      out.push_back({level.back(), count, fraction(count, txns.size())});
    }
  }

  while (level.size() > 1) {
    std::vector<ItemSet> candidates = next_candidates(level);
    const std::vector<std::size_t> counts = count_supports(candidates, txns);
    level.clear();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (counts[c] < min_support) continue;
      level.push_back(candidates[c]);
      out.push_back({candidates[c], counts[c], fraction(counts[c], txns.size())});
    }
  }
  std::sort(out.begin(), out.end(), itemset_order);
  return out;
}

std::vector<AssociationRule> derive_rules(
    std::span<const FrequentItemset> frequents,
    std::span<const Transaction> txns, double min_confidence, double min_lift) {
  std::map<std::vector<ItemId>, std::size_t> known;
  for (const FrequentItemset& f : frequents) {
    known.emplace(f.items.items(), f.support_count);
  }
  auto count_of = [&](const std::vector<ItemId>& items) {
    auto it = known.find(items);
    if (it != known.end()) return it->second;
    const std::size_t n = count_containing(ItemSet(items), txns);
    known.emplace(items, n);
    return n;
  };

  std::vector<AssociationRule> rules;
  const std::size_t total = txns.size();
  for (const FrequentItemset& f : frequents) {
    const std::size_t k = f.items.size();
    if (k < 2) continue;
    if (k > 30) throw ArgumentError("itemset too large for rule enumeration");
    const std::size_t both = f.support_count;
    const std::uint32_t full = (std::uint32_t{1} << k) - 1;
    for (std::uint32_t mask = 1; mask < full; ++mask) {
      std::vector<ItemId> ante;
      std::vector<ItemId> cons;
      for (std::size_t i = 0; i < k; ++i) {
        ((mask >> i) & 1U ? ante : cons).push_back(f.items[i]);
      }
      const std::size_t ante_count = count_of(ante);
      const std::size_t cons_count = count_of(cons);
      if (ante_count == 0 || cons_count == 0) continue;
      const double conf = fraction(both, ante_count);
      const double lft = conf / fraction(cons_count, total);
      if (conf < min_confidence || lft < min_lift) continue;
      rules.push_back({ItemSet(std::move(ante)), ItemSet(std::move(cons)),
                       fraction(both, total), conf, lft});
    }
  }
  std::sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) {
    if (a.antecedent != b.antecedent) return a.antecedent < b.antecedent;
    return a.consequent < b.consequent;
  });
  return rules;
}

void write_rules(std::ostream& out, std::span<const AssociationRule> rules) {
  for (const AssociationRule& r : rules) {
    write_items(out, r.antecedent);
    out << '|';
    write_items(out, r.consequent);
    out << '|' << format_real(r.support) << '|' << format_real(r.confidence)
        << '|' << format_real(r.lift) << '\n';
  }
}

std::vector<AssociationRule> read_rules(std::istream& in) {
  std::vector<AssociationRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line, '|');
    if (fields.size() != 5) {
      throw ParseError(line_no, "expected 5 '|'-separated fields");
    }
    rules.push_back({parse_items(fields[0], line_no),
                     parse_items(fields[1], line_no),
                     parse_real(fields[2], line_no),
                     parse_real(fields[3], line_no),
                     parse_real(fields[4], line_no)});
  }
  return rules;
}

void save_rules(const std::filesystem::path& path,
                std::span<const AssociationRule> rules) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_rules(out, rules);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<AssociationRule> load_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_rules(in);
}

}  // namespace fmar::mining
