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

#ifndef FMAR_PROFILES_H_
#define FMAR_PROFILES_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fmar/common.h"
#include "fmar/ingest.h"
#include "fmar/mining.h"

namespace fmar::profiles {

struct UserProfile {
  UserId user_id = 0;
  std::set<ItemId> recommended;

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

class ProfileStore {
 public:
  ProfileStore() = default;
  ProfileStore(std::map<UserId, UserProfile> profiles, std::string generated_from)
      : profiles_(std::move(profiles)),
        generated_from_(std::move(generated_from)) {}

  const std::map<UserId, UserProfile>& profiles() const { return profiles_; }
  const std::string& generated_from() const { return generated_from_; }
  // Null when the user has no profile.
  const UserProfile* find(UserId user) const;

  friend bool operator==(const ProfileStore&, const ProfileStore&) = default;

 private:
  std::map<UserId, UserProfile> profiles_;
  std::string generated_from_;
};

enum class Similarity { kPearson, kCosine };

// Items each training user rated strictly above `favor_threshold`.
std::map<UserId, std::vector<ItemId>> favorable_items(
    const ingest::RatingDataset& train, Rating favor_threshold);

// For every training user: the union of consequents of rules whose
// antecedent is a subset of the user's favorable items, minus those items.
ProfileStore build_profiles(std::span<const mining::AssociationRule> rules,
                            const ingest::RatingDataset& train,
                            Rating favor_threshold,
                            std::string generated_from = {});

struct Shortlist {
  std::set<ItemId> items;
  bool fallback = false;
};

// candidates n profile, or all of `candidates` with fallback set when that
// intersection is empty. Users without a profile take the fallback path.
Shortlist shortlist(UserId user, const std::set<ItemId>& candidates,
                    const ProfileStore& store);

// Similarity over co-rated items. Pearson needs >= 2 co-rated items and
// non-zero variance on both sides, cosine needs >= 1 co-rated item; 0
// otherwise.
double user_similarity(UserId u, UserId v, const ingest::RatingDataset& train,
                       Similarity measure);

// The user's profile joined with those of the n most similar other users
// (ties by ascending id), minus the user's favorable items.
UserProfile neighbor_expand(const ProfileStore& store, UserId user,
                            std::size_t n, const ingest::RatingDataset& train,
                            Similarity measure, Rating favor_threshold);

// `user_id: item,item,...`, ascending items.
void write_profiles(std::ostream& out, const ProfileStore& store);
ProfileStore read_profiles(std::istream& in, std::string generated_from = {});
void save_profiles(const std::filesystem::path& path, const ProfileStore& store);

}  // namespace fmar::profiles

#endif  // FMAR_PROFILES_H_
