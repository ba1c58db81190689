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

#include "fmar/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "fmar/fm.h"
#include "fmar/ingest.h"
#include "fmar/mining.h"
#include "fmar/profiles.h"

namespace fmar::cli {
namespace {

namespace fs = std::filesystem;

// A failure inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

ingest::RatingDataset load_data(const RunConfig& cfg) {
  if (cfg.data_path.empty()) throw ArgumentError("no data file given");
  return ingest::load_ratings(cfg.data_path);
}

ingest::EvalSplit make_split(const ingest::RatingDataset& ds,
                             const RunConfig& cfg) {
  const std::vector<UserId> users =
      ingest::select_eval_users(ds, cfg.eval_users);
  return ingest::split_per_user(ds, users, cfg.test_frac, cfg.split_seed());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_manifest(const RunConfig& cfg, const std::string& command) {
  std::ostringstream m;
  m << "# fmar run manifest\n"
    << "fmar_version = " << kVersion << '\n'
    << "command = " << command << '\n'
    << "config_sha256 = " << config_hash(cfg) << '\n'
    << "seed = " << cfg.seed << '\n'
    << "split_seed = " << cfg.split_seed() << '\n'
    << "fm_seed = " << cfg.fm_seed() << '\n'
    << "\n# config\n"
    << serialize_config(cfg);
  write_file(cfg.output_dir / "manifest.txt", m.str());
}

const char* miner_name(eval::Miner m) {
  return m == eval::Miner::kApriori ? "apriori" : "fpgrowth";
}

}  // namespace

MineStats cmd_mine(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const ingest::RatingDataset ds = load_data(cfg);
  const ingest::EvalSplit split = stage("split", [&] { return make_split(ds, cfg); });
  ensure_dir(cfg.output_dir);

  MineStats stats;
  stats.transactions =
      ingest::extract_transactions(split.train, cfg.favor_threshold).size();
  for (eval::Miner miner : {eval::Miner::kApriori, eval::Miner::kFpGrowth}) {
    const std::string name = miner_name(miner);
    const MiningParams& params =
        miner == eval::Miner::kApriori ? cfg.apriori : cfg.fpgrowth;
    const eval::RuleSet rules = stage("mine " + name, [&] {
      return eval::mine_rules(split.train, miner, params, cfg.favor_threshold);
    });
    mining::save_rules(cfg.output_dir / ("rules_" + name + ".txt"), rules.rules);
    profiles::save_profiles(cfg.output_dir / ("profiles_" + name + ".txt"),
                            rules.profiles);
    if (miner == eval::Miner::kApriori) {
      stats.apriori_itemsets = rules.frequents.size();
      stats.apriori_rules = rules.rules.size();
    } else {
      stats.fpgrowth_itemsets = rules.frequents.size();
      stats.fpgrowth_rules = rules.rules.size();
    }
    out << name << ": " << rules.frequents.size() << " frequent itemsets, "
        << rules.rules.size() << " rules (min_support " << params.min_support
        << ", min_confidence " << params.min_confidence << ", min_lift "
        << params.min_lift << ", " << stats.transactions << " transactions)\n";
  }
  write_manifest(cfg, "mine");
  return stats;
}

eval::ExperimentReport cmd_evaluate(const RunConfig& cfg, std::ostream& out,
                                    std::ostream& log) {
  validate(cfg);
  Timer total;
  const ingest::RatingDataset ds = load_data(cfg);
  const ingest::EvalSplit split = stage("split", [&] { return make_split(ds, cfg); });

  Timer train_time;
  const fm::FeatureIndex index = fm::FeatureIndex::from_dataset(split.train);
  const fm::FmModel model = stage("train", [&] {
    return fm::train_sgd(split.train, index, cfg.train_config());
  });
  log << "trained FM on " << split.train.size() << " ratings in "
      << train_time.seconds() << " s\n";

  Timer eval_time;
  const eval::ExperimentReport report = stage("evaluate", [&] {
    return eval::run_experiment(split, cfg, model, index);
  });
  log << "mined rules and evaluated " << report.users.size() << " users in "
      << eval_time.seconds() << " s\n";

  stage("report", [&] {
    ensure_dir(cfg.output_dir);
    std::ostringstream per_user, summary, table;
    eval::write_per_user_csv(per_user, report);
    eval::write_summary_csv(summary, report);
    eval::write_table(table, report, cfg.ndcg_k);
    write_file(cfg.output_dir / "per_user.csv", per_user.str());
    write_file(cfg.output_dir / "summary.csv", summary.str());
    write_file(cfg.output_dir / "report.txt", table.str());
    write_manifest(cfg, "evaluate");
    out << table.str();
  });
  log << "total " << total.seconds() << " s\n";
  return report;
}

RecommendResult cmd_recommend(const RunConfig& cfg, UserId user,
                              std::size_t top_n, eval::Miner engine,
                              std::ostream& out, std::ostream& log) {
  validate(cfg);
  const ingest::RatingDataset ds = load_data(cfg);
  if (!ds.has_user(user)) {
    throw ArgumentError("unknown user " + std::to_string(user));
  }

  RecommendResult result;
  if (top_n == 0) {
    out << "user " << user << ": no recommendations requested\n";
    return result;
  }

  const fm::FeatureIndex index = fm::FeatureIndex::from_dataset(ds);
  const fs::path model_path =
      cfg.output_dir / ("model_" + config_hash(cfg).substr(0, 16) + ".txt");
  fm::FmModel model;
  if (fs::exists(model_path)) {
    model = stage("load model", [&] { return fm::load_model(model_path); });
    log << "loaded cached model " << model_path.string() << '\n';
  } else {
    model = stage("train", [&] {
      return fm::train_sgd(ds, index, cfg.train_config());
    });
    ensure_dir(cfg.output_dir);
    fm::save_model(model_path, model);
    log << "trained model cached at " << model_path.string() << '\n';
  }
  if (model.dimension() != index.dimension()) {
    throw StageError("load model", "cached model does not match the data");
  }

  const MiningParams& params =
      engine == eval::Miner::kApriori ? cfg.apriori : cfg.fpgrowth;
  const eval::RuleSet rules = stage("mine", [&] {
    return eval::mine_rules(ds, engine, params, cfg.favor_threshold);
  });

  std::set<ItemId> candidates;
  {
    std::set<ItemId> rated;
    for (const ingest::RatingRecord& r : ds.records_of(user)) {
      rated.insert(r.item_id);
    }
    for (ItemId item : ds.items()) {
      if (!rated.contains(item)) candidates.insert(item);
    }
  }
  result.candidates = candidates.size();
  if (candidates.empty()) {
    out << "user " << user << " has rated every item\n";
    return result;
  }

  const profiles::Shortlist picked =
      profiles::shortlist(user, candidates, rules.profiles);
  result.fallback = picked.fallback;
  std::vector<ItemId> items(picked.items.begin(), picked.items.end());
  std::vector<fm::FeatureVector> xs;
  xs.reserve(items.size());
  for (ItemId item : items) xs.push_back(fm::encode(user, item, index));
  const std::vector<double> scores = fm::predict_many(model, xs);
  result.scored = scores.size();

  for (std::size_t i = 0; i < items.size(); ++i) {
    result.items.push_back({items[i], scores[i]});
  }
  std::stable_sort(result.items.begin(), result.items.end(),
                   [](const Recommendation& a, const Recommendation& b) {
                     return a.score > b.score;
                   });
  if (result.items.size() > top_n) result.items.resize(top_n);

  out << "user " << user << ": scored " << result.scored << " of "
      << result.candidates << " unrated items ("
      << (result.fallback ? "fallback: profile missed every candidate"
                          : "short-listed by " + std::string(miner_name(engine)) +
                                " rules")
      << ")\n";
  for (std::size_t i = 0; i < result.items.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof(line), "%3zu  item %-6u  score %.4f\n", i + 1,
                  result.items[i].item, result.items[i].score);
    out << line;
  }
  return result;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Association-rule shortlisting for factorization-machine "
               "recommenders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  std::string data_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "INI config file");
    cmd->add_option("--data", data_path, "tab-separated rating file");
    cmd->add_option("--seed", seed, "top-level random seed");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--set", overrides,
                    "override any config field, e.g. --set fm.epochs=20")
        ->take_all();
  };

  CLI::App* mine = app.add_subcommand("mine", "mine association rules");
  add_common(mine);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "compare FM against both FMAR variants");
  add_common(evaluate);
  CLI::App* recommend =
      app.add_subcommand("recommend", "top-N recommendations for one user");
  add_common(recommend);
  UserId user = 0;
  std::size_t top_n = 10;
  std::string engine = "fpgrowth";
  recommend->add_option("--user", user, "user id")->required();
  recommend->add_option("--top-n", top_n, "number of items to print");
  recommend->add_option("--engine", engine, "rule source")
      ->check(CLI::IsMember({"apriori", "fpgrowth"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!data_path.empty()) cfg.data_path = data_path;
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    for (const std::string& o : overrides) apply_override(cfg, o);
    validate(cfg);
    if (cfg.data_path.empty()) throw ArgumentError("no data file (--data)");
  } catch (const std::exception& e) {
    err << "error: config: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (mine->parsed()) {
      cmd_mine(cfg, out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(cfg, out, err);
    } else {
      cmd_recommend(cfg, user, top_n,
                    engine == "apriori" ? eval::Miner::kApriori
                                        : eval::Miner::kFpGrowth,
                    out, err);
    }
  } catch (const StageError& e) {
    err << "error: " << e.what() << '\n';
    return kPipelineError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const ParseError& e) {
    err << "error: data: " << e.what() << '\n';
    return kDataError;
  } catch (const DuplicateError& e) {
    err << "error: data: " << e.what() << '\n';
    return kDataError;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPipelineError;
  }
  return kOk;
}

}  // namespace fmar::cli
