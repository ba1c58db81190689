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

#ifndef FMAR_CONFIG_H_
#define FMAR_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "fmar/common.h"
#include "fmar/fm.h"
#include "fmar/profiles.h"

namespace fmar {

struct MiningParams {
  std::size_t min_support = 1;
  double min_confidence = 0.65;
  double min_lift = 1.0;

  friend bool operator==(const MiningParams&, const MiningParams&) = default;
};

// Every knob of a run. Defaults reproduce the reference experiment:
// 50 heavy users, 70% test share, min_support 250 (Apriori) and 60
// (FP-growth), min_confidence 0.65, 8 factors, 100 epochs.
struct RunConfig {
  std::filesystem::path data_path;
  std::filesystem::path output_dir = "fmar_out";
  std::uint64_t seed = 42;
  Rating favor_threshold = 3;
  std::size_t eval_users = 50;
  double test_frac = 0.7;
  std::size_t ndcg_k = 10;
  bool clamp_predictions = false;
  std::size_t neighbors = 0;
  profiles::Similarity similarity = profiles::Similarity::kPearson;
  MiningParams apriori{250, 0.65, 1.0};
  MiningParams fpgrowth{60, 0.65, 1.0};
  fm::TrainConfig fm{};  // fm.seed is ignored, see fm_seed()

  // Stage seeds: the split uses `seed`, FM init and shuffling use seed + 1.
  std::uint64_t split_seed() const { return seed; }
  std::uint64_t fm_seed() const { return seed + 1; }
  fm::TrainConfig train_config() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws ArgumentError naming the first out-of-range field.
void validate(const RunConfig& cfg);

// INI text with [run], [apriori], [fpgrowth] and [fm] sections. Keys missing
// from the text keep their defaults; unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
// Canonical serialization: every key, fixed order, reals with 17 digits.
std::string serialize_config(const RunConfig& cfg);

// Applies one `section.key=value` override.
void apply_override(RunConfig& cfg, std::string_view assignment);

// Hex SHA-256 of serialize_config(cfg).
std::string config_hash(const RunConfig& cfg);

inline constexpr std::string_view kVersion = "0.3.0";

}  // namespace fmar

#endif  // FMAR_CONFIG_H_
