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

#ifndef FMAR_EXPERIMENT_H_
#define FMAR_EXPERIMENT_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "fmar/config.h"
#include "fmar/fm.h"
#include "fmar/ingest.h"
#include "fmar/metrics.h"
#include "fmar/mining.h"
#include "fmar/profiles.h"

namespace fmar::eval {

// Full-set ("fm") versus short-listed scoring of one user's test items.
struct UserResult {
  UserId user_id = 0;
  double mae_full = 0.0;
  double mae_short = 0.0;
  double ndcg_full = 0.0;
  double ndcg_short = 0.0;
  std::size_t n_pred_full = 0;
  std::size_t n_pred_short = 0;
  bool fallback_used = false;
};

struct MetricSummary {
  double mean = 0.0;
  FiveNumber spread;
};

// One FMAR variant against plain FM on the same users.
struct VariantReport {
  std::string engine;  // "fmar_apriori" or "fmar_fpgrowth"
  MiningParams mining;
  std::size_t frequent_itemsets = 0;
  std::size_t rules = 0;
  std::vector<UserResult> per_user;  // ascending user_id
  MetricSummary mae_short;
  MetricSummary ndcg_short;
  MetricSummary n_pred_short;
  std::size_t total_short = 0;
  std::size_t fallback_users = 0;
  RankSumResult mae_test;   // FM sample first
  RankSumResult ndcg_test;  // FM sample first
};

struct ExperimentReport {
  std::vector<UserId> users;          // evaluated, ascending
  std::vector<UserId> skipped_users;  // empty test set
  // Test ratings of items never seen in training; the model cannot score
  // them, so they are left out of every candidate set.
  std::size_t unscorable_test_records = 0;
  MetricSummary mae_full;
  MetricSummary ndcg_full;
  MetricSummary n_pred_full;
  std::size_t total_full = 0;
  std::vector<VariantReport> variants;
};

// Scores one user's test records on the full set and on the shortlist.
UserResult evaluate_user(const fm::FmModel& model, const fm::FeatureIndex& index,
                         UserId user,
                         const std::vector<ingest::RatingRecord>& test,
                         const profiles::ProfileStore& store,
                         std::size_t ndcg_k, bool clamp);

// Mined rules and profiles for one variant.
struct RuleSet {
  std::vector<mining::FrequentItemset> frequents;
  std::vector<mining::AssociationRule> rules;
  profiles::ProfileStore profiles;
};

enum class Miner { kApriori, kFpGrowth };

RuleSet mine_rules(const ingest::RatingDataset& train, Miner miner,
                   const MiningParams& params, Rating favor_threshold);

// Trains one FM on split.train, mines both rule sets, then compares full and
// short-listed scoring for every evaluation user. Users are evaluated in
// parallel; results are ordered by user id.
ExperimentReport run_experiment(const ingest::EvalSplit& split,
                                const RunConfig& cfg);
// Same, with an already trained model.
ExperimentReport run_experiment(const ingest::EvalSplit& split,
                                const RunConfig& cfg, const fm::FmModel& model,
                                const fm::FeatureIndex& index);

// engine,user_id,mae_full,mae_short,ndcg_full,ndcg_short,n_pred_full,
// n_pred_short,fallback_used
void write_per_user_csv(std::ostream& out, const ExperimentReport& report);
// metric,engine,value
void write_summary_csv(std::ostream& out, const ExperimentReport& report);
// Plain-text table of engines against MAE, NDCG, prediction counts and
// p-values.
void write_table(std::ostream& out, const ExperimentReport& report,
                 std::size_t ndcg_k);

}  // namespace fmar::eval

#endif  // FMAR_EXPERIMENT_H_
