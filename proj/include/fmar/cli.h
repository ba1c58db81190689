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

#ifndef FMAR_CLI_H_
#define FMAR_CLI_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "fmar/config.h"
#include "fmar/experiment.h"

namespace fmar::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kPipelineError = 3,
};

struct MineStats {
  std::size_t transactions = 0;
  std::size_t apriori_itemsets = 0;
  std::size_t apriori_rules = 0;
  std::size_t fpgrowth_itemsets = 0;
  std::size_t fpgrowth_rules = 0;
};

// Mines both rule sets from the training split and writes rules_apriori.txt,
// rules_fpgrowth.txt, the matching profile files and manifest.txt under
// cfg.output_dir. With eval_users = 0 the whole file is the training split.
MineStats cmd_mine(const RunConfig& cfg, std::ostream& out);

// Runs the experiment and writes per_user.csv, summary.csv, report.txt and
// manifest.txt under cfg.output_dir.
eval::ExperimentReport cmd_evaluate(const RunConfig& cfg, std::ostream& out,
                                    std::ostream& log);

struct Recommendation {
  ItemId item = 0;
  double score = 0.0;
};

struct RecommendResult {
  std::vector<Recommendation> items;  // best first
  bool fallback = false;
  std::size_t candidates = 0;
  std::size_t scored = 0;
};

// Ranks the user's unrated items by FM score over the short-listed candidate
// set. The model is trained on every rating in the file and cached under
// cfg.output_dir, keyed by the config hash.
RecommendResult cmd_recommend(const RunConfig& cfg, UserId user,
                              std::size_t top_n, eval::Miner engine,
                              std::ostream& out, std::ostream& log);

// Parses argv and dispatches. Returns an ExitCode.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fmar::cli

#endif  // FMAR_CLI_H_
