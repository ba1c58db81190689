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

#include "fmar/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

namespace fmar::ingest {
namespace {

template <typename T>
bool parse_int(std::string_view field, T& out) {
  if (field.empty()) return false;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

RatingRecord parse_line(std::string_view line, std::size_t line_no) {
  std::string_view fields[4];
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (n == 4) throw ParseError(line_no, "expected 4 fields, got more");
    fields[n++] = line.substr(start, tab == std::string_view::npos
                                         ? std::string_view::npos
                                         : tab - start);
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (n != 4) {
    throw ParseError(line_no, "expected 4 fields, got " + std::to_string(n));
  }

  RatingRecord r;
  if (!parse_int(fields[0], r.user_id) || !parse_int(fields[1], r.item_id) ||
      !parse_int(fields[2], r.rating) || !parse_int(fields[3], r.timestamp)) {
    throw ParseError(line_no, "non-integer field");
  }
  if (r.user_id < 1) throw ParseError(line_no, "user_id must be >= 1");
  if (r.item_id < 1) throw ParseError(line_no, "item_id must be >= 1");
  if (r.rating < 1 || r.rating > 5) {
    throw ParseError(line_no,
                     "rating " + std::to_string(r.rating) + " out of [1,5]");
  }
  if (r.timestamp < 0) throw ParseError(line_no, "negative timestamp");
  return r;
}

}  // namespace

RatingDataset::RatingDataset(std::vector<RatingRecord> records)
    : records_(std::move(records)) {
  std::set<std::pair<UserId, ItemId>> seen;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const RatingRecord& r = records_[i];
    if (r.rating < 1 || r.rating > 5 || r.user_id < 1 || r.item_id < 1) {
      throw ArgumentError("invalid rating record at position " +
                          std::to_string(i));
    }
    if (!seen.emplace(r.user_id, r.item_id).second) {
      throw DuplicateError("duplicate rating for user " +
                           std::to_string(r.user_id) + ", item " +
                           std::to_string(r.item_id));
    }
    by_user_[r.user_id].push_back(i);
  }
}

std::vector<UserId> RatingDataset::users() const {
  std::vector<UserId> out;
  out.reserve(by_user_.size());
  for (const auto& [user, _] : by_user_) out.push_back(user);
  return out;
}

std::vector<ItemId> RatingDataset::items() const {
  std::vector<ItemId> out;
  out.reserve(records_.size());
  for (const RatingRecord& r : records_) out.push_back(r.item_id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<RatingRecord> RatingDataset::records_of(UserId user) const {
  std::vector<RatingRecord> out;
  auto it = by_user_.find(user);
  if (it == by_user_.end()) return out;
  out.reserve(it->second.size());
  for (std::size_t idx : it->second) out.push_back(records_[idx]);
  return out;
}

RatingDataset parse_ratings(std::string_view text) {
  std::vector<RatingRecord> records;
  std::set<std::pair<UserId, ItemId>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    RatingRecord r = parse_line(line, line_no);
    if (!seen.emplace(r.user_id, r.item_id).second) {
      throw DuplicateError("line " + std::to_string(line_no) +
                           ": duplicate rating for user " +
                           std::to_string(r.user_id) + ", item " +
                           std::to_string(r.item_id));
    }
    records.push_back(r);
  }
  return RatingDataset(std::move(records));
}

RatingDataset load_ratings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open rating file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_ratings(buf.str());
}

std::vector<UserId> select_eval_users(const RatingDataset& ds, std::size_t n) {
  const auto& by_user = ds.by_user();
  if (n > by_user.size()) {
    throw ArgumentError("requested " + std::to_string(n) +
                        " evaluation users but the dataset has " +
                        std::to_string(by_user.size()));
  }
  std::vector<std::pair<std::size_t, UserId>> counts;
  counts.reserve(by_user.size());
  for (const auto& [user, idx] : by_user) counts.emplace_back(idx.size(), user);
  std::stable_sort(counts.begin(), counts.end(), [](auto& a, auto& b) {
    return a.first > b.first;  // by_user is ordered, so ties stay ascending
  });
  std::vector<UserId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(counts[i].second);
  return out;
}

EvalSplit split_per_user(const RatingDataset& ds, std::span<const UserId> users,
                         double test_frac, std::uint64_t seed) {
  if (!(test_frac >= 0.0 && test_frac <= 1.0)) {
    throw ArgumentError("test_frac must lie in [0,1]");
  }
  std::set<UserId> unique_users(users.begin(), users.end());
  if (unique_users.size() != users.size()) {
    throw ArgumentError("evaluation user list contains duplicates");
  }

  std::mt19937_64 rng(seed);
  std::vector<bool> in_test(ds.size(), false);
  EvalSplit split;
  split.seed = seed;
  for (UserId user : users) {
    auto it = ds.by_user().find(user);
    if (it == ds.by_user().end()) {
      throw ArgumentError("evaluation user " + std::to_string(user) +
                          " not in dataset");
    }
    const std::vector<std::size_t>& idx = it->second;
    // The epsilon keeps products such as 0.7 * 10 from flooring to 6.
    const auto n_test = static_cast<std::size_t>(
        std::floor(test_frac * static_cast<double>(idx.size()) + 1e-9));
    std::vector<std::size_t> chosen;
    chosen.reserve(n_test);
    std::sample(idx.begin(), idx.end(), std::back_inserter(chosen), n_test,
                rng);
    auto& test = split.test_by_user[user];
    test.reserve(chosen.size());
    for (std::size_t i : chosen) {
      in_test[i] = true;
      test.push_back(ds.records()[i]);
    }
  }

  std::vector<RatingRecord> train;
  train.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (!in_test[i]) train.push_back(ds.records()[i]);
  }
  split.train = RatingDataset(std::move(train));
  return split;
}

std::vector<Transaction> extract_transactions(const RatingDataset& train,
                                              Rating favor_threshold) {
  if (favor_threshold < 1 || favor_threshold > 5) {
    throw ArgumentError("favor_threshold must lie in [1,5]");
  }
  std::vector<Transaction> out;
  for (const auto& [user, idx] : train.by_user()) {
    Transaction t{user, {}};
    for (std::size_t i : idx) {
      const RatingRecord& r = train.records()[i];
      if (r.rating > favor_threshold) t.items.push_back(r.item_id);
    }
    if (t.items.empty()) continue;
    std::sort(t.items.begin(), t.items.end());
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace fmar::ingest
