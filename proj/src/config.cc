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

#include "fmar/config.h"

#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace fmar {
namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  std::string section;
  std::string key;
  Setter set;
  Getter get;
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ArgumentError("config key '" + key + "': cannot parse '" + text + "'");
  }
  return value;
}

std::string real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ArgumentError("config key '" + key + "': expected true/false");
}

template <typename T, typename Member>
Field integer_field(std::string section, std::string key, Member member) {
  const std::string full = section + "." + key;
  return {section, key,
          [member, full](RunConfig& c, const std::string& v) {
            std::invoke(member, c) = parse_number<T>(full, v);
          },
          [member](const RunConfig& c) {
            return std::to_string(std::invoke(member, c));
          }};
}

template <typename Member>
Field real_field(std::string section, std::string key, Member member) {
  const std::string full = section + "." + key;
  return {section, key,
          [member, full](RunConfig& c, const std::string& v) {
            std::invoke(member, c) = parse_number<double>(full, v);
          },
          [member](const RunConfig& c) { return real(std::invoke(member, c)); }};
}

Field mining_field(const std::string& section, MiningParams RunConfig::*params,
                   const std::string& key) {
  const std::string full = section + "." + key;
  auto pick = [params, key](auto& c) -> auto& { return c.*params; };
  if (key == "min_support") {
    return {section, key,
            [pick, full](RunConfig& c, const std::string& v) {
              pick(c).min_support = parse_number<std::size_t>(full, v);
            },
            [pick](const RunConfig& c) {
              return std::to_string(pick(c).min_support);
            }};
  }
  const bool conf = key == "min_confidence";
  return {section, key,
          [pick, full, conf](RunConfig& c, const std::string& v) {
            (conf ? pick(c).min_confidence : pick(c).min_lift) =
                parse_number<double>(full, v);
          },
          [pick, conf](const RunConfig& c) {
            return real(conf ? pick(c).min_confidence : pick(c).min_lift);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = [] {
    std::vector<Field> f;
    f.push_back({"run", "data",
                 [](RunConfig& c, const std::string& v) { c.data_path = v; },
                 [](const RunConfig& c) { return c.data_path.string(); }});
    f.push_back({"run", "output_dir",
                 [](RunConfig& c, const std::string& v) { c.output_dir = v; },
                 [](const RunConfig& c) { return c.output_dir.string(); }});
    f.push_back(integer_field<std::uint64_t>("run", "seed", &RunConfig::seed));
    f.push_back(integer_field<Rating>("run", "favor_threshold",
                                      &RunConfig::favor_threshold));
    f.push_back(
        integer_field<std::size_t>("run", "eval_users", &RunConfig::eval_users));
    f.push_back(real_field("run", "test_frac", &RunConfig::test_frac));
    f.push_back(integer_field<std::size_t>("run", "ndcg_k", &RunConfig::ndcg_k));
    f.push_back({"run", "clamp_predictions",
                 [](RunConfig& c, const std::string& v) {
                   c.clamp_predictions = parse_bool("run.clamp_predictions", v);
                 },
                 [](const RunConfig& c) {
                   return std::string(c.clamp_predictions ? "true" : "false");
                 }});
    f.push_back(
        integer_field<std::size_t>("run", "neighbors", &RunConfig::neighbors));
    f.push_back({"run", "similarity",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "pearson") {
                     c.similarity = profiles::Similarity::kPearson;
                   } else if (v == "cosine") {
                     c.similarity = profiles::Similarity::kCosine;
                   } else {
                     throw ArgumentError(
                         "config key 'run.similarity': expected pearson or "
                         "cosine");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::string(c.similarity == profiles::Similarity::kCosine
                                          ? "cosine"
                                          : "pearson");
                 }});
    for (const char* key : {"min_support", "min_confidence", "min_lift"}) {
      f.push_back(mining_field("apriori", &RunConfig::apriori, key));
    }
    for (const char* key : {"min_support", "min_confidence", "min_lift"}) {
      f.push_back(mining_field("fpgrowth", &RunConfig::fpgrowth, key));
    }
    f.push_back({"fm", "k",
                 [](RunConfig& c, const std::string& v) {
                   c.fm.k = parse_number<std::size_t>("fm.k", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.fm.k); }});
    f.push_back({"fm", "epochs",
                 [](RunConfig& c, const std::string& v) {
                   c.fm.epochs = parse_number<int>("fm.epochs", v);
                 },
                 [](const RunConfig& c) { return std::to_string(c.fm.epochs); }});
    f.push_back({"fm", "learning_rate",
                 [](RunConfig& c, const std::string& v) {
                   c.fm.learning_rate = parse_number<double>("fm.learning_rate", v);
                 },
                 [](const RunConfig& c) { return real(c.fm.learning_rate); }});
    f.push_back({"fm", "l2_reg",
                 [](RunConfig& c, const std::string& v) {
                   c.fm.l2_reg = parse_number<double>("fm.l2_reg", v);
                 },
                 [](const RunConfig& c) { return real(c.fm.l2_reg); }});
    f.push_back({"fm", "init_stddev",
                 [](RunConfig& c, const std::string& v) {
                   c.fm.init_stddev = parse_number<double>("fm.init_stddev", v);
                 },
                 [](const RunConfig& c) { return real(c.fm.init_stddev); }});
    return f;
  }();
  return kFields;
}

const Field& find_field(const std::string& section, const std::string& key) {
  for (const Field& f : fields()) {
    if (f.section == section && f.key == key) return f;
  }
  throw ArgumentError("unknown config key '" + section + "." + key + "'");
}

void check_mining(const MiningParams& p, const std::string& name) {
  if (p.min_support < 1) throw ArgumentError(name + ".min_support must be >= 1");
  if (!(p.min_confidence >= 0.0 && p.min_confidence <= 1.0)) {
    throw ArgumentError(name + ".min_confidence must lie in [0,1]");
  }
  if (!(p.min_lift >= 0.0)) throw ArgumentError(name + ".min_lift must be >= 0");
}

}  // namespace

fm::TrainConfig RunConfig::train_config() const {
  fm::TrainConfig t = fm;
  t.seed = fm_seed();
  return t;
}

void validate(const RunConfig& cfg) {
  if (cfg.favor_threshold < 1 || cfg.favor_threshold > 5) {
    throw ArgumentError("run.favor_threshold must lie in [1,5]");
  }
  if (!(cfg.test_frac >= 0.0 && cfg.test_frac <= 1.0)) {
    throw ArgumentError("run.test_frac must lie in [0,1]");
  }
  if (cfg.ndcg_k < 1) throw ArgumentError("run.ndcg_k must be >= 1");
  check_mining(cfg.apriori, "apriori");
  check_mining(cfg.fpgrowth, "fpgrowth");
  if (cfg.fm.k < 1) throw ArgumentError("fm.k must be >= 1");
  if (cfg.fm.epochs < 1) throw ArgumentError("fm.epochs must be >= 1");
  if (!(cfg.fm.learning_rate > 0.0)) {
    throw ArgumentError("fm.learning_rate must be positive");
  }
  if (!(cfg.fm.l2_reg >= 0.0)) throw ArgumentError("fm.l2_reg must be >= 0");
  if (!(cfg.fm.init_stddev > 0.0)) {
    throw ArgumentError("fm.init_stddev must be positive");
  }
}

RunConfig parse_config(std::string_view text) {
  boost::property_tree::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParseError(e.line(), e.message());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (!body.data().empty()) {
      throw ArgumentError("config key '" + section + "' is outside a section");
    }
    for (const auto& [key, value] : body) {
      find_field(section, key).set(cfg, value.data());
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const Field& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
  return out.str();
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  const std::size_t dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw ArgumentError("override must look like section.key=value, got '" +
                        std::string(assignment) + "'");
  }
  const std::string section(assignment.substr(0, dot));
  const std::string key(assignment.substr(dot + 1, eq - dot - 1));
  find_field(section, key).set(cfg, std::string(assignment.substr(eq + 1)));
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = serialize_config(cfg);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

}  // namespace fmar
