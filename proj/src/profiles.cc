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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <utility>

namespace fmar::profiles {
namespace {

std::map<ItemId, Rating> ratings_of(const ingest::RatingDataset& train,
                                    UserId user) {
  std::map<ItemId, Rating> out;
  for (const ingest::RatingRecord& r : train.records_of(user)) {
    out.emplace(r.item_id, r.rating);
  }
  return out;
}

void erase_all(std::set<ItemId>& from, std::span<const ItemId> items) {
  for (ItemId item : items) from.erase(item);
}

}  // namespace

const UserProfile* ProfileStore::find(UserId user) const {
  auto it = profiles_.find(user);
  return it == profiles_.end() ? nullptr : &it->second;
}

std::map<UserId, std::vector<ItemId>> favorable_items(
    const ingest::RatingDataset& train, Rating favor_threshold) {
  std::map<UserId, std::vector<ItemId>> out;
  for (const auto& [user, idx] : train.by_user()) {
    std::vector<ItemId>& items = out[user];
    for (std::size_t i : idx) {
      const ingest::RatingRecord& r = train.records()[i];
      if (r.rating > favor_threshold) items.push_back(r.item_id);
    }
    std::sort(items.begin(), items.end());
  }
  return out;
}

ProfileStore build_profiles(std::span<const mining::AssociationRule> rules,
                            const ingest::RatingDataset& train,
                            Rating favor_threshold,
                            std::string generated_from) {
  const auto favorable = favorable_items(train, favor_threshold);
  std::vector<UserId> users;
  users.reserve(favorable.size());
  for (const auto& [user, _] : favorable) users.push_back(user);

  std::vector<UserProfile> built(users.size());
  const auto n = static_cast<std::ptrdiff_t>(users.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t u = 0; u < n; ++u) {
    const std::vector<ItemId>& high = favorable.at(users[u]);
    UserProfile& profile = built[u];
    profile.user_id = users[u];
    if (high.empty()) continue;
    for (const mining::AssociationRule& rule : rules) {
      if (rule.antecedent.is_subset_of(high)) {
        profile.recommended.insert(rule.consequent.begin(),
                                   rule.consequent.end());
      }
    }
    erase_all(profile.recommended, high);
  }

  std::map<UserId, UserProfile> profiles;
  for (UserProfile& p : built) profiles.emplace(p.user_id, std::move(p));
  return ProfileStore(std::move(profiles), std::move(generated_from));
}

Shortlist shortlist(UserId user, const std::set<ItemId>& candidates,
                    const ProfileStore& store) {
  if (candidates.empty()) throw ArgumentError("empty candidate set");
  Shortlist out;
  if (const UserProfile* profile = store.find(user)) {
    std::set_intersection(candidates.begin(), candidates.end(),
                          profile->recommended.begin(),
                          profile->recommended.end(),
                          std::inserter(out.items, out.items.end()));
  }
  if (out.items.empty()) {
    out.items = candidates;
    out.fallback = true;
  }
  return out;
}

double user_similarity(UserId u, UserId v, const ingest::RatingDataset& train,
                       Similarity measure) {
  const auto ru = ratings_of(train, u);
  const auto rv = ratings_of(train, v);
  std::vector<std::pair<double, double>> common;
  for (const auto& [item, rating] : ru) {
    auto it = rv.find(item);
    if (it != rv.end()) common.emplace_back(rating, it->second);
  }

  if (measure == Similarity::kCosine) {
    if (common.empty()) return 0.0;
    double dot = 0, nu = 0, nv = 0;
    for (auto [a, b] : common) {
      dot += a * b;
      nu += a * a;
      nv += b * b;
    }
    return std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
  }

  if (common.size() < 2) return 0.0;
  double mu = 0, mv = 0;
  for (auto [a, b] : common) {
    mu += a;
    mv += b;
  }
  mu /= static_cast<double>(common.size());
  mv /= static_cast<double>(common.size());
  double cov = 0, vu = 0, vv = 0;
  for (auto [a, b] : common) {
    cov += (a - mu) * (b - mv);
    vu += (a - mu) * (a - mu);
    vv += (b - mv) * (b - mv);
  }
  if (vu == 0.0 || vv == 0.0) return 0.0;
  return std::clamp(cov / std::sqrt(vu * vv), -1.0, 1.0);
}

UserProfile neighbor_expand(const ProfileStore& store, UserId user,
                            std::size_t n, const ingest::RatingDataset& train,
                            Similarity measure, Rating favor_threshold) {
  UserProfile out;
  out.user_id = user;
  if (const UserProfile* own = store.find(user)) out = *own;
  if (n == 0) return out;

  std::vector<std::pair<double, UserId>> ranked;
  for (UserId other : train.users()) {
    if (other == user) continue;
    ranked.emplace_back(user_similarity(user, other, train, measure), other);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) {
    return a.first > b.first;  // users() is ascending, so ties keep id order
  });
  ranked.resize(std::min(n, ranked.size()));

  for (const auto& [_, neighbor] : ranked) {
    if (const UserProfile* p = store.find(neighbor)) {
      out.recommended.insert(p->recommended.begin(), p->recommended.end());
    }
  }
  std::vector<ItemId> favorable;
  for (const ingest::RatingRecord& r : train.records_of(user)) {
    if (r.rating > favor_threshold) favorable.push_back(r.item_id);
  }
  erase_all(out.recommended, favorable);
  return out;
}

void write_profiles(std::ostream& out, const ProfileStore& store) {
  for (const auto& [user, profile] : store.profiles()) {
    out << user << ':';
    const char* sep = " ";
    for (ItemId item : profile.recommended) {
      out << sep << item;
      sep = ",";
    }
    out << '\n';
  }
}

ProfileStore read_profiles(std::istream& in, std::string generated_from) {
  std::map<UserId, UserProfile> profiles;
  std::string line;
  std::size_t line_no = 0;
  auto parse_id = [&](std::string_view tok) {
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    std::uint32_t id = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), id);
    if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
      throw ParseError(line_no, "bad id '" + std::string(tok) + "'");
    }
    return id;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(line_no, "missing ':'");
    UserProfile profile;
    profile.user_id = parse_id(std::string_view(line).substr(0, colon));
    std::string_view rest = std::string_view(line).substr(colon + 1);
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    while (!rest.empty()) {
      const std::size_t comma = rest.find(',');
      profile.recommended.insert(parse_id(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (!profiles.emplace(profile.user_id, std::move(profile)).second) {
      throw ParseError(line_no, "duplicate profile");
    }
  }
  return ProfileStore(std::move(profiles), std::move(generated_from));
}

void save_profiles(const std::filesystem::path& path,
                   const ProfileStore& store) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_profiles(out, store);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace fmar::profiles
