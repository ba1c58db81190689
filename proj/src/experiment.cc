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

#include "fmar/experiment.h"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "fmar/fp_tree.h"

namespace fmar::eval {
namespace {

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<double> scores(const fm::FmModel& model, const fm::FeatureIndex& index,
                           UserId user,
                           const std::vector<ingest::RatingRecord>& records,
                           bool clamp) {
  std::vector<fm::FeatureVector> xs;
  xs.reserve(records.size());
  for (const ingest::RatingRecord& r : records) {
    xs.push_back(fm::encode(user, r.item_id, index));
  }
  std::vector<double> out = fm::predict_many(model, xs);
  if (clamp) {
    for (double& y : out) y = std::clamp(y, 1.0, 5.0);
  }
  return out;
}

void score_set(const std::vector<ingest::RatingRecord>& records,
               const std::vector<double>& predicted, std::size_t ndcg_k,
               double& mae_out, double& ndcg_out) {
  std::vector<double> truths;
  std::vector<Scored> scored;
  truths.reserve(records.size());
  scored.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    truths.push_back(records[i].rating);
    scored.push_back({predicted[i], static_cast<double>(records[i].rating)});
  }
  mae_out = mae(predicted, truths);
  ndcg_out = ndcg_at_k(scored, ndcg_k);
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.spread = five_number(values);
  return s;
}

// Eval users' profiles widened with their nearest neighbors' profiles.
profiles::ProfileStore expand_for(const profiles::ProfileStore& base,
                                  const std::vector<UserId>& users,
                                  const RunConfig& cfg,
                                  const ingest::RatingDataset& train) {
  std::map<UserId, profiles::UserProfile> all = base.profiles();
  for (UserId u : users) {
    all[u] = profiles::neighbor_expand(base, u, cfg.neighbors, train,
                                       cfg.similarity, cfg.favor_threshold);
  }
  return profiles::ProfileStore(std::move(all), base.generated_from());
}

void write_five(std::ostream& out, const std::string& metric,
                const std::string& engine, const FiveNumber& f) {
  out << metric << "_min," << engine << ',' << real(f.min) << '\n';
  out << metric << "_q1," << engine << ',' << real(f.q1) << '\n';
  out << metric << "_median," << engine << ',' << real(f.median) << '\n';
  out << metric << "_q3," << engine << ',' << real(f.q3) << '\n';
  out << metric << "_max," << engine << ',' << real(f.max) << '\n';
}

}  // namespace

UserResult evaluate_user(const fm::FmModel& model, const fm::FeatureIndex& index,
                         UserId user,
                         const std::vector<ingest::RatingRecord>& test,
                         const profiles::ProfileStore& store,
                         std::size_t ndcg_k, bool clamp) {
  if (test.empty()) throw ArgumentError("user has no test ratings");
  UserResult r;
  r.user_id = user;

  std::set<ItemId> candidates;
  for (const ingest::RatingRecord& rec : test) candidates.insert(rec.item_id);
  const std::vector<double> full = scores(model, index, user, test, clamp);
  r.n_pred_full = full.size();
  score_set(test, full, ndcg_k, r.mae_full, r.ndcg_full);

  const profiles::Shortlist picked = profiles::shortlist(user, candidates, store);
  r.fallback_used = picked.fallback;
  std::vector<ingest::RatingRecord> kept;
  for (const ingest::RatingRecord& rec : test) {
    if (picked.items.contains(rec.item_id)) kept.push_back(rec);
  }
  const std::vector<double> short_scores =
      scores(model, index, user, kept, clamp);
  r.n_pred_short = short_scores.size();
  score_set(kept, short_scores, ndcg_k, r.mae_short, r.ndcg_short);
  return r;
}

RuleSet mine_rules(const ingest::RatingDataset& train, Miner miner,
                   const MiningParams& params, Rating favor_threshold) {
  const std::vector<ingest::Transaction> txns =
      ingest::extract_transactions(train, favor_threshold);
  RuleSet out;
  out.frequents = miner == Miner::kApriori
                      ? mining::apriori(txns, params.min_support)
                      : mining::fp_growth(txns, params.min_support);
  out.rules = mining::derive_rules(out.frequents, txns, params.min_confidence,
                                   params.min_lift);
  out.profiles = profiles::build_profiles(
      out.rules, train, favor_threshold,
      miner == Miner::kApriori ? "apriori" : "fpgrowth");
  return out;
}

ExperimentReport run_experiment(const ingest::EvalSplit& split,
                                const RunConfig& cfg) {
  validate(cfg);
  const fm::FeatureIndex index = fm::FeatureIndex::from_dataset(split.train);
  const fm::FmModel model = fm::train_sgd(split.train, index, cfg.train_config());
  return run_experiment(split, cfg, model, index);
}

ExperimentReport run_experiment(const ingest::EvalSplit& split,
                                const RunConfig& cfg, const fm::FmModel& model,
                                const fm::FeatureIndex& index) {
  validate(cfg);
  ExperimentReport report;

  std::vector<std::vector<ingest::RatingRecord>> tests;
  for (const auto& [user, records] : split.test_by_user) {
    if (!index.has_user(user)) {
      throw EncodingError("evaluation user " + std::to_string(user) +
                          " has no training ratings");
    }
    std::vector<ingest::RatingRecord> scorable;
    for (const ingest::RatingRecord& r : records) {
      if (index.has_item(r.item_id)) {
        scorable.push_back(r);
      } else {
        ++report.unscorable_test_records;
      }
    }
    if (scorable.empty()) {
      report.skipped_users.push_back(user);
      continue;
    }
    report.users.push_back(user);
    tests.push_back(std::move(scorable));
  }
  if (report.users.empty()) throw ArgumentError("no user has test ratings");

  const struct {
    const char* engine;
    Miner miner;
    const MiningParams* params;
  } variants[] = {{"fmar_apriori", Miner::kApriori, &cfg.apriori},
                  {"fmar_fpgrowth", Miner::kFpGrowth, &cfg.fpgrowth}};

  for (const auto& v : variants) {
    RuleSet rules =
        mine_rules(split.train, v.miner, *v.params, cfg.favor_threshold);
    if (cfg.neighbors > 0) {
      rules.profiles =
          expand_for(rules.profiles, report.users, cfg, split.train);
    }

    VariantReport vr;
    vr.engine = v.engine;
    vr.mining = *v.params;
    vr.frequent_itemsets = rules.frequents.size();
    vr.rules = rules.rules.size();
    vr.per_user.resize(report.users.size());
    const auto n = static_cast<std::ptrdiff_t>(report.users.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      vr.per_user[i] = evaluate_user(model, index, report.users[i], tests[i],
                                     rules.profiles, cfg.ndcg_k,
                                     cfg.clamp_predictions);
    }
    report.variants.push_back(std::move(vr));
  }

  // Full-set numbers do not depend on the variant; take them from the first.
  const std::vector<UserResult>& base = report.variants.front().per_user;
  std::vector<double> mae_full, ndcg_full, npred_full;
  for (const UserResult& r : base) {
    mae_full.push_back(r.mae_full);
    ndcg_full.push_back(r.ndcg_full);
    npred_full.push_back(static_cast<double>(r.n_pred_full));
    report.total_full += r.n_pred_full;
  }
  report.mae_full = summarize(mae_full);
  report.ndcg_full = summarize(ndcg_full);
  report.n_pred_full = summarize(npred_full);

  for (VariantReport& vr : report.variants) {
    std::vector<double> mae_short, ndcg_short, npred_short;
    for (const UserResult& r : vr.per_user) {
      mae_short.push_back(r.mae_short);
      ndcg_short.push_back(r.ndcg_short);
      npred_short.push_back(static_cast<double>(r.n_pred_short));
      vr.total_short += r.n_pred_short;
      vr.fallback_users += r.fallback_used ? 1 : 0;
    }
    vr.mae_short = summarize(mae_short);
    vr.ndcg_short = summarize(ndcg_short);
    vr.n_pred_short = summarize(npred_short);
    vr.mae_test = wilcoxon_rank_sum(mae_full, mae_short);
    vr.ndcg_test = wilcoxon_rank_sum(ndcg_full, ndcg_short);
  }
  return report;
}

void write_per_user_csv(std::ostream& out, const ExperimentReport& report) {
  out << "engine,user_id,mae_full,mae_short,ndcg_full,ndcg_short,n_pred_full,"
         "n_pred_short,fallback_used\n";
  for (const VariantReport& vr : report.variants) {
    for (const UserResult& r : vr.per_user) {
      out << vr.engine << ',' << r.user_id << ',' << real(r.mae_full) << ','
          << real(r.mae_short) << ',' << real(r.ndcg_full) << ','
          << real(r.ndcg_short) << ',' << r.n_pred_full << ','
          << r.n_pred_short << ',' << (r.fallback_used ? 1 : 0) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const ExperimentReport& report) {
  out << "metric,engine,value\n";
  out << "users,all," << report.users.size() << '\n';
  out << "skipped_users,all," << report.skipped_users.size() << '\n';
  out << "unscorable_test_records,all," << report.unscorable_test_records
      << '\n';
  out << "mean_mae,fm," << real(report.mae_full.mean) << '\n';
  out << "mean_ndcg,fm," << real(report.ndcg_full.mean) << '\n';
  out << "total_predictions,fm," << report.total_full << '\n';
  write_five(out, "mae", "fm", report.mae_full.spread);
  write_five(out, "ndcg", "fm", report.ndcg_full.spread);
  write_five(out, "n_pred", "fm", report.n_pred_full.spread);
  for (const VariantReport& vr : report.variants) {
    const std::string& e = vr.engine;
    out << "frequent_itemsets," << e << ',' << vr.frequent_itemsets << '\n';
    out << "rules," << e << ',' << vr.rules << '\n';
    out << "mean_mae," << e << ',' << real(vr.mae_short.mean) << '\n';
    out << "mean_ndcg," << e << ',' << real(vr.ndcg_short.mean) << '\n';
    out << "total_predictions," << e << ',' << vr.total_short << '\n';
    out << "reduction_factor," << e << ','
        << real(vr.total_short == 0
                    ? 0.0
                    : static_cast<double>(report.total_full) /
                          static_cast<double>(vr.total_short))
        << '\n';
    out << "fallback_users," << e << ',' << vr.fallback_users << '\n';
    write_five(out, "mae", e, vr.mae_short.spread);
    write_five(out, "ndcg", e, vr.ndcg_short.spread);
    write_five(out, "n_pred", e, vr.n_pred_short.spread);
    out << "u_mae," << e << ',' << real(vr.mae_test.u_a) << '\n';
    out << "p_mae," << e << ',' << real(vr.mae_test.p_two_sided) << '\n';
    out << "u_ndcg," << e << ',' << real(vr.ndcg_test.u_a) << '\n';
    out << "p_ndcg," << e << ',' << real(vr.ndcg_test.p_two_sided) << '\n';
  }
}

void write_table(std::ostream& out, const ExperimentReport& report,
                 std::size_t ndcg_k) {
  std::ostringstream ndcg_head;
  ndcg_head << "NDCG@" << ndcg_k;
  out << std::left << std::setw(15) << "engine" << std::right << std::setw(10)
      << "mean MAE" << std::setw(10) << ndcg_head.str() << std::setw(13)
      << "predictions" << std::setw(11) << "reduction" << std::setw(11)
      << "fallbacks" << std::setw(11) << "p(MAE)" << std::setw(11)
      << "p(NDCG)" << '\n';
  auto fixed = [](double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
  };
  out << std::left << std::setw(15) << "fm" << std::right << std::setw(10)
      << fixed(report.mae_full.mean, 4) << std::setw(10)
      << fixed(report.ndcg_full.mean, 4) << std::setw(13) << report.total_full
      << std::setw(11) << "1.00x" << std::setw(11) << "-" << std::setw(11)
      << "-" << std::setw(11) << "-" << '\n';
  for (const VariantReport& vr : report.variants) {
    const double factor =
        vr.total_short == 0 ? 0.0
                            : static_cast<double>(report.total_full) /
                                  static_cast<double>(vr.total_short);
    out << std::left << std::setw(15) << vr.engine << std::right
        << std::setw(10) << fixed(vr.mae_short.mean, 4) << std::setw(10)
        << fixed(vr.ndcg_short.mean, 4) << std::setw(13) << vr.total_short
        << std::setw(11) << (fixed(factor, 2) + "x") << std::setw(11)
        << vr.fallback_users << std::setw(11)
        << real(vr.mae_test.p_two_sided).substr(0, 9) << std::setw(11)
        << real(vr.ndcg_test.p_two_sided).substr(0, 9) << '\n';
  }
  out << "\n" << report.users.size() << " users";
  if (!report.skipped_users.empty()) {
    out << ", " << report.skipped_users.size() << " skipped (no test ratings)";
  }
  if (report.unscorable_test_records > 0) {
    out << ", " << report.unscorable_test_records
        << " test ratings of unseen items ignored";
  }
  out << '\n';
}

}  // namespace fmar::eval
