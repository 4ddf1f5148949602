// src/pipeline/config.cc

// Copyright 2026  The lexloop authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lexloop/pipeline/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "lexloop/core/error.h"
#include "lexloop/core/text.h"
#include "lexloop/util/hash.h"

namespace lexloop::pipeline {
namespace {

namespace pt = boost::property_tree;

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

// Canonical `section.key = value` lines; also the hash input.
std::vector<std::pair<std::string, std::string>> canonical(const PipelineConfig& c, bool with_run_dir) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"paths.seed_lexicon", c.seed_lexicon.string()},
      {"paths.corpus", c.corpus.string()},
      {"paths.decode_corpus", c.decode_corpus.string()},
      {"paths.gold_lexicon", c.gold_lexicon.string()},
      {"paths.test_lexicon", c.test_lexicon.string()},
  };
  if (with_run_dir) kv.emplace_back("paths.run_dir", c.run_dir.string());
  std::string pretrain;
  for (std::size_t i = 0; i < c.pretrain.size(); ++i) {
    pretrain += (i ? "," : "") + c.pretrain[i].tag + "=" + c.pretrain[i].lexicon.string();
  }
  const std::vector<std::pair<std::string, std::string>> rest = {
      {"g2p.order", std::to_string(c.g2p_order)},
      {"g2p.em_iters", std::to_string(c.g2p_em_iters)},
      {"g2p.lambda", num(c.lambda)},
      {"g2p.beam", std::to_string(c.beam)},
      {"g2p.seed", std::to_string(c.g2p_seed)},
      {"g2p.pretrain", pretrain},
      {"g2p.exclude_target_vocab", c.exclude_target_vocab ? "true" : "false"},
      {"lm.order", std::to_string(c.lm_order)},
      {"noise.p_sub", num(c.p_sub)},
      {"noise.p_ins", num(c.p_ins)},
      {"noise.p_del", num(c.p_del)},
      {"noise.seed", std::to_string(c.noise_seed)},
      {"noise.n_candidates", std::to_string(c.n_candidates)},
      {"topology.loop", num(c.topology.loop)},
      {"topology.advance", num(c.topology.advance)},
      {"topology.skip", num(c.topology.skip)},
      {"topology.enter_first", num(c.topology.enter_first)},
      {"topology.enter_second", num(c.topology.enter_second)},
      {"lexlearn.max_iters", std::to_string(c.em_max_iters)},
      {"lexlearn.tol", num(c.em_tol)},
      {"experiment.k", join_ints(c.k_values)},
      {"experiment.iterations", std::to_string(c.iterations)},
      {"experiment.seed_sizes", join_ints(c.seed_sizes)},
      {"experiment.validation_fraction", num(c.validation_fraction)},
      {"experiment.min_validation_words", std::to_string(c.min_validation_words)},
  };
  kv.insert(kv.end(), rest.begin(), rest.end());
  return kv;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  T v{};
  if (!(is >> v) || !(is >> std::ws).eof()) throw Error("config: bad value for " + key + ": '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error("config: bad boolean for " + key + ": '" + text + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw Error("config: empty item in " + key);
    out.push_back(parse_number<int>(key, item.substr(b, e - b + 1)));
  }
  return out;
}

std::filesystem::path resolve(const std::string& text, const std::filesystem::path& base) {
  if (text.empty()) return {};
  std::filesystem::path p(text);
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

void PipelineConfig::validate() const {
  if (seed_lexicon.empty()) throw Error("config: paths.seed_lexicon is required");
  if (corpus.empty()) throw Error("config: paths.corpus is required");
  if (test_lexicon.empty()) throw Error("config: paths.test_lexicon is required");
  if (run_dir.empty()) throw Error("config: paths.run_dir is required");
  if (g2p_order < 1 || g2p_order > 5) throw Error("config: g2p.order must be in [1,5]");
  if (g2p_em_iters < 0) throw Error("config: g2p.em_iters must be >= 0");
  if (!(lambda >= 1.0)) throw Error("config: g2p.lambda must be >= 1");
  if (beam < 1) throw Error("config: g2p.beam must be >= 1");
  if (lm_order < 1 || lm_order > 7) throw Error("config: lm.order must be in [1,7]");
  for (double p : {p_sub, p_ins, p_del}) {
    if (!(p >= 0.0 && p < 1.0)) throw Error("config: noise rates must lie in [0,1)");
  }
  if (!(p_sub + p_del < 1.0)) throw Error("config: noise.p_sub + noise.p_del must be < 1");
  if (n_candidates < 1) throw Error("config: noise.n_candidates must be >= 1");
  topology.validate();
  if (em_max_iters < 0) throw Error("config: lexlearn.max_iters must be >= 0");
  if (!(em_tol >= 0.0)) throw Error("config: lexlearn.tol must be >= 0");
  if (k_values.empty()) throw Error("config: experiment.k must not be empty");
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    if (k_values[i] < 1) throw Error("config: experiment.k values must be >= 1");
    if (i > 0 && k_values[i] <= k_values[i - 1]) throw Error("config: experiment.k must be strictly increasing");
  }
  if (iterations < 1) throw Error("config: experiment.iterations must be >= 1");
  for (int n : seed_sizes) {
    if (n < 1) throw Error("config: experiment.seed_sizes values must be >= 1");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw Error("config: experiment.validation_fraction must be in (0,1)");
  }
  if (min_validation_words < 1) throw Error("config: experiment.min_validation_words must be >= 1");
  std::set<std::string> tags;
  for (const auto& p : pretrain) {
    if (p.tag.empty() || p.lexicon.empty()) throw Error("config: g2p.pretrain items must be tag=path");
    if (!tags.insert(p.tag).second) throw Error("config: duplicate pretrain tag '" + p.tag + "'");
  }
}

PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  // The INI reader only knows ';' comments.
  std::ostringstream cleaned;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t");
    if (b != std::string::npos && line[b] == '#') line = ";" + line;
    cleaned << line << '\n';
  }
  pt::ptree tree;
  try {
    std::istringstream is(cleaned.str());
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError("config", e.line(), e.message());
  }

  PipelineConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw Error("config: key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string name = section + "." + key;
      const std::string v = node.get_value<std::string>();
      if (name == "paths.seed_lexicon") c.seed_lexicon = resolve(v, base_dir);
      else if (name == "paths.corpus") c.corpus = resolve(v, base_dir);
      else if (name == "paths.decode_corpus") c.decode_corpus = resolve(v, base_dir);
      else if (name == "paths.gold_lexicon") c.gold_lexicon = resolve(v, base_dir);
      else if (name == "paths.test_lexicon") c.test_lexicon = resolve(v, base_dir);
      else if (name == "paths.run_dir") c.run_dir = resolve(v, base_dir);
      else if (name == "g2p.order") c.g2p_order = parse_number<int>(name, v);
      else if (name == "g2p.em_iters") c.g2p_em_iters = parse_number<int>(name, v);
      else if (name == "g2p.lambda") c.lambda = parse_number<double>(name, v);
      else if (name == "g2p.beam") c.beam = parse_number<int>(name, v);
      else if (name == "g2p.seed") c.g2p_seed = parse_number<std::uint64_t>(name, v);
      else if (name == "g2p.exclude_target_vocab") c.exclude_target_vocab = parse_bool(name, v);
      else if (name == "g2p.pretrain") {
        c.pretrain.clear();
        std::stringstream ss(v);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
          if (b == std::string::npos) continue;
          item = item.substr(b, e - b + 1);
          const auto eq = item.find('=');
          if (eq == std::string::npos) throw Error("config: g2p.pretrain items must be tag=path");
          c.pretrain.push_back({item.substr(0, eq), resolve(item.substr(eq + 1), base_dir)});
        }
      }
      else if (name == "lm.order") c.lm_order = parse_number<int>(name, v);
      else if (name == "noise.p_sub") c.p_sub = parse_number<double>(name, v);
      else if (name == "noise.p_ins") c.p_ins = parse_number<double>(name, v);
      else if (name == "noise.p_del") c.p_del = parse_number<double>(name, v);
      else if (name == "noise.seed") c.noise_seed = parse_number<std::uint64_t>(name, v);
      else if (name == "noise.n_candidates") c.n_candidates = parse_number<int>(name, v);
      else if (name == "topology.loop") c.topology.loop = parse_number<double>(name, v);
      else if (name == "topology.advance") c.topology.advance = parse_number<double>(name, v);
      else if (name == "topology.skip") c.topology.skip = parse_number<double>(name, v);
      else if (name == "topology.enter_first") c.topology.enter_first = parse_number<double>(name, v);
      else if (name == "topology.enter_second") c.topology.enter_second = parse_number<double>(name, v);
      else if (name == "lexlearn.max_iters") c.em_max_iters = parse_number<int>(name, v);
      else if (name == "lexlearn.tol") c.em_tol = parse_number<double>(name, v);
      else if (name == "experiment.k") c.k_values = parse_int_list(name, v);
      else if (name == "experiment.iterations") c.iterations = parse_number<int>(name, v);
      else if (name == "experiment.seed_sizes") c.seed_sizes = parse_int_list(name, v);
      else if (name == "experiment.validation_fraction") c.validation_fraction = parse_number<double>(name, v);
      else if (name == "experiment.min_validation_words") c.min_validation_words = parse_number<int>(name, v);
      else throw Error("config: unknown key '" + name + "'");
    }
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

void write_config(const PipelineConfig& cfg, std::ostream& out) {
  std::string section;
  for (const auto& [name, value] : canonical(cfg, true)) {
    const auto dot = name.find('.');
    if (name.substr(0, dot) != section) {
      section = name.substr(0, dot);
      out << (out.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
    }
    out << name.substr(dot + 1) << " = " << value << '\n';
  }
}

std::string config_hash(const PipelineConfig& cfg) {
  Fnv1a h;
  for (const auto& [name, value] : canonical(cfg, false)) h.field(name).field(value);
  return h.hex();
}

}  // namespace lexloop::pipeline
