// tests/acceptance.cc

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

// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Lines starting with '#' are details.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "lexloop/core/io.h"
#include "lexloop/core/text.h"
#include "lexloop/eval/metrics.h"
#include "lexloop/lexlearn/baum_welch.h"
#include "lexloop/lexlearn/emission_table.h"
#include "lexloop/lexlearn/hmm.h"
#include "lexloop/lexlearn/viterbi.h"
#include "lexloop/pipeline/pipeline.h"
#include "lexloop/synthlang/synth.h"
#include "oracles.h"

namespace fs = std::filesystem;
using namespace lexloop;
using lexlearn::EmissionTable;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const std::string& name, const Verdict& v) {
  fmt::print("{} criterion {:>2}: {}{}\n", v.pass ? "PASS" : "FAIL", id, name,
             v.detail.empty() ? "" : " (" + v.detail + ")");
  std::fflush(stdout);
  if (!v.pass) ++g_failures;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string join(const std::vector<double>& v, const char* f = "{:.4f}") {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt::format(fmt::runtime(f), x);
  return s;
}

// ---------------------------------------------------------------- oracles

Verdict viterbi_oracle() {
  int checked = 0, no_path = 0, bad = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    CounterRng rng(0xacce, i);
    const auto inst = oracle::random_instance(rng, 4, 12, 12);
    oracle::PathEnumerator en(inst.words, inst.phones, inst.table, inst.topology);
    en.run();
    ++checked;
    if (en.num_paths() == 0) {
      ++no_path;
      try {
        lexlearn::viterbi_align(inst.words, inst.phones, inst.table, inst.topology);
        ++bad;
      } catch (const AlignmentError&) {
      }
      continue;
    }
    const auto al = lexlearn::viterbi_align(inst.words, inst.phones, inst.table, inst.topology);
    if (std::abs(al.log_score - en.max_score()) > 1e-9) ++bad;
  }
  return {bad == 0, fmt::format("{} instances, {} without a path, {} mismatches", checked, no_path, bad)};
}

Verdict em_oracle() {
  static const std::vector<std::string> graphemes = {"a", "b", "c", "d"};
  static const std::vector<std::string> phonemes = {"A", "B", "C"};
  int bad_ll = 0, bad_rows = 0, bad_tying = 0;
  double worst_drop = 0;
  for (std::uint64_t c = 0; c < 100; ++c) {
    Corpus corpus;
    for (std::uint64_t s = 0; s < 6; ++s) {
      CounterRng rng(0xe3, c * 64 + s);
      const auto inst = oracle::random_instance(rng, 3, 8, 9);
      corpus.sentences.push_back({inst.words, inst.phones});
    }
    lexlearn::EmOptions opts;
    opts.tol = 0;
    opts.max_iters = 15;
    const auto init = lexlearn::init_emissions(graphemes, phonemes);
    const auto r = lexlearn::em_train(corpus, init, lexlearn::Topology{}, opts);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) {
      const double drop = r.log_likelihood[i - 1] - r.log_likelihood[i];
      worst_drop = std::max(worst_drop, drop);
      if (drop > 1e-8) ++bad_ll;
    }
    // One emission row per grapheme, and every state reads the row of its
    // own grapheme, so all occurrences of a grapheme share parameters.
    if (r.table.graphemes().size() != graphemes.size()) ++bad_tying;
    for (SymbolId g = 0; g < static_cast<SymbolId>(graphemes.size()); ++g) {
      const auto& row = r.table.row(g);
      if (row.size() != phonemes.size()) ++bad_tying;
      if (std::abs(std::accumulate(row.begin(), row.end(), 0.0) - 1.0) > 1e-9) ++bad_rows;
    }
    for (const auto& s : corpus.sentences) {
      const auto hmm = lexlearn::SentenceHmm::build(s.words, r.table);
      int st = 0;
      for (const auto& w : s.words) {
        for (const auto& g : split_utf8(w)) {
          if (hmm.state_grapheme[static_cast<std::size_t>(st++)] != *r.table.graphemes().find(g)) ++bad_tying;
        }
      }
      if (st != hmm.num_states()) ++bad_tying;
    }
  }
  return {bad_ll == 0 && bad_rows == 0 && bad_tying == 0,
          fmt::format("100 corpora, {} likelihood drops (worst {:.2e}), {} bad rows, {} tying violations", bad_ll,
                      worst_drop, bad_rows, bad_tying)};
}

Verdict edit_distance_oracle() {
  const std::vector<std::string> alphabet = {"x", "y", "z"};
  std::vector<Pronunciation> all = {{}};
  for (std::size_t len = 1, from = 0; len <= 4; ++len) {
    const std::size_t to = all.size();
    for (std::size_t i = from; i < to; ++i) {
      for (const auto& s : alphabet) {
        auto p = all[i];
        p.push_back(s);
        all.push_back(std::move(p));
      }
    }
    from = to;
  }
  std::size_t pairs = 0, bad = 0;
  for (const auto& a : all) {
    for (const auto& b : all) {
      ++pairs;
      if (eval::edit_distance(a, b) != oracle::edit_distance(a, b)) ++bad;
    }
  }
  for (std::uint64_t i = 0; i < 1000; ++i) {
    CounterRng rng(0xed, i);
    Pronunciation a(rng.below(7)), b(rng.below(7));
    for (auto& s : a) s = alphabet[rng.below(3)];
    for (auto& s : b) s = alphabet[rng.below(3)];
    ++pairs;
    if (eval::edit_distance(a, b) != oracle::edit_distance(a, b)) ++bad;
  }
  return {bad == 0, fmt::format("{} pairs, {} mismatches", pairs, bad)};
}

// ---------------------------------------------------------------- fixtures

struct SeedRuns {
  pipeline::RunManifest standard, sweep, iterate, clean;
};

pipeline::PipelineConfig base_config(const fs::path& lang, const fs::path& run) {
  pipeline::PipelineConfig cfg;
  cfg.seed_lexicon = lang / "seed_500.lex";
  cfg.corpus = lang / "corpus.txt";
  cfg.gold_lexicon = lang / "gold.lex";
  cfg.test_lexicon = lang / "test.lex";
  cfg.run_dir = run;
  return cfg;
}

void make_language(const synthlang::SynthSpec& spec, const fs::path& dir) {
  if (fs::exists(dir / "seed_500.lex")) return;
  const auto lang = synthlang::generate_language(spec);
  synthlang::write_language(lang, dir);
  write_lexicon(synthlang::split_seed(lang, {500}).seeds[0], dir / "seed_500.lex");
}

template <typename F>
pipeline::RunManifest timed(const std::string& what, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  auto m = f();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  fmt::print("# {} finished in {:.1f} s ({} stages recomputed)\n", what, s, m.recomputed.size());
  std::fflush(stdout);
  return m;
}

SeedRuns run_seed(const fs::path& work, std::uint64_t seed) {
  const fs::path root = work / fmt::format("seed{}", seed);
  synthlang::SynthSpec spec;
  spec.seed = seed;
  make_language(spec, root / "lang");
  SeedRuns r;
  auto cfg = base_config(root / "lang", root / "standard");
  r.standard = timed(fmt::format("seed {} pipeline", seed), [&] { return pipeline::run_pipeline(cfg); });

  cfg.run_dir = root / "sweep";
  cfg.seed_sizes = {50, 2000};
  r.sweep = timed(fmt::format("seed {} seed sweep", seed), [&] { return pipeline::run_seed_sweep(cfg); });

  cfg = base_config(root / "lang", root / "iterate");
  cfg.iterations = 3;
  r.iterate = timed(fmt::format("seed {} self-training", seed), [&] { return pipeline::run_iterations(cfg); });

  synthlang::SynthSpec clean_spec = spec;
  clean_spec.irregularity_rate = 0;
  make_language(clean_spec, root / "clean_lang");
  cfg = base_config(root / "clean_lang", root / "clean");
  cfg.p_sub = cfg.p_ins = cfg.p_del = 0;
  cfg.k_values = {1};
  r.clean = timed(fmt::format("seed {} zero-noise pipeline", seed), [&] { return pipeline::run_pipeline(cfg); });
  return r;
}

// ---------------------------------------------------------------- criteria

const pipeline::KResult& at_k(const pipeline::RunManifest& m, int k) {
  for (const auto& r : m.k_results) {
    if (r.k == k) return r;
  }
  throw Error(fmt::format("no result for k={}", k));
}

const std::vector<int> kKs = {1, 2, 4, 6, 8};

Verdict threshold_shape(const std::vector<SeedRuns>& runs) {
  std::vector<double> sizes, pers;
  for (int k : kKs) {
    std::vector<double> s, p;
    for (const auto& r : runs) {
      const auto& kr = at_k(r.standard, k);
      s.push_back(static_cast<double>(kr.learned_words));
      p.push_back(kr.learned_vs_gold->per);
    }
    fmt::print("#   k={}: words {}  learned PER {}\n", k, join(s, "{:.0f}"), join(p));
    sizes.push_back(mean(s));
    pers.push_back(mean(p));
  }
  bool ok = true;
  for (std::size_t i = 1; i < kKs.size(); ++i) ok = ok && sizes[i] < sizes[i - 1] && pers[i] <= pers[i - 1];
  return {ok, fmt::format("mean words {}; mean learned PER {}", join(sizes, "{:.1f}"), join(pers, "{:.5f}"))};
}

Verdict end_to_end(const std::vector<SeedRuns>& runs) {
  std::vector<double> rel, base, learned;
  for (const auto& r : runs) {
    rel.push_back(at_k(r.standard, 1).rel_reduction);
    base.push_back(r.standard.baseline->per);
    learned.push_back(at_k(r.standard, 1).test.per);
  }
  fmt::print("#   baseline PER {}\n#   k=1 PER      {}\n#   rel reduction {}\n", join(base), join(learned), join(rel));
  return {mean(rel) > 0.05, fmt::format("mean relative reduction {:.2f}%", 100 * mean(rel))};
}

Verdict k1_vs_k2(const std::vector<SeedRuns>& runs) {
  std::vector<double> p1, p2;
  for (const auto& r : runs) {
    p1.push_back(at_k(r.standard, 1).test.per);
    p2.push_back(at_k(r.standard, 2).test.per);
  }
  fmt::print("#   k=1 PER {}\n#   k=2 PER {}\n", join(p1), join(p2));
  return {mean(p1) <= mean(p2), fmt::format("mean PER k=1 {:.5f}, k=2 {:.5f}", mean(p1), mean(p2))};
}

Verdict seed_size(const std::vector<SeedRuns>& runs) {
  std::vector<double> small, large;
  for (const auto& r : runs) {
    for (const auto& row : r.sweep.sweep) {
      (row.seed_size == 50 ? small : large).push_back(row.improvement);
    }
  }
  fmt::print("#   improvement at 50   {}\n#   improvement at 2000 {}\n", join(small), join(large));
  return {small.size() == runs.size() && large.size() == runs.size() && mean(small) > mean(large),
          fmt::format("mean improvement {:.5f} at 50, {:.5f} at 2000", mean(small), mean(large))};
}

Verdict self_training(const std::vector<SeedRuns>& runs) {
  std::vector<std::vector<double>> rel(4);
  double worst = -1;
  for (const auto& r : runs) {
    const auto& its = r.iterate.iterations;
    if (its.size() != 4) return {false, fmt::format("expected 4 iteration rows, got {}", its.size())};
    std::vector<double> per;
    for (const auto& it : its) per.push_back(it.test.per);
    fmt::print("#   PER by iteration {}  accepted {}{}{}\n", join(per), its[1].accepted, its[2].accepted,
               its[3].accepted);
    for (std::size_t i = 1; i < its.size(); ++i) {
      rel[i].push_back(its[i].rel_reduction);
      if (i >= 2) worst = std::max(worst, per[i] - per[i - 1]);
    }
  }
  const double r1 = mean(rel[1]), r2 = mean(rel[2]), r3 = mean(rel[3]);
  const bool ok = r1 >= r2 && r1 >= r3 && worst <= 0.005;
  return {ok, fmt::format("mean rel reduction {:.4f} {:.4f} {:.4f}; worst later change {:+.5f} PER", r1, r2, r3,
                          worst)};
}

Verdict zero_noise(const std::vector<SeedRuns>& runs, const fs::path& work) {
  bool ok = true;
  std::string detail;
  std::uint64_t seed = 1;
  for (const auto& r : runs) {
    const auto& kr = at_k(r.clean, 1);
    const Lexicon gold = read_lexicon(work / fmt::format("seed{}", seed++) / "clean_lang" / "gold.lex");
    ok = ok && kr.learned_vs_gold && kr.learned_vs_gold->total_edits == 0 && kr.learned_vs_gold->skipped == 0 &&
         kr.learned_words == gold.num_words();
    detail += fmt::format("{}{}/{} words, {} edits", detail.empty() ? "" : "; ", kr.learned_words, gold.num_words(),
                          kr.learned_vs_gold ? kr.learned_vs_gold->total_edits : 0);
  }
  return {ok, detail};
}

std::map<std::string, std::string> tree_files(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == "timings.tsv") continue;
    out[fs::relative(e.path(), root).generic_string()] = read_file(e.path());
  }
  return out;
}

Verdict determinism(const fs::path& work) {
  const fs::path lang = work / "seed1" / "lang";
  std::vector<std::map<std::string, std::string>> trees;
  for (const char* name : {"det_a", "det_b"}) {
    fs::remove_all(work / name);
    timed(fmt::format("determinism run {}", name), [&] { return pipeline::run_pipeline(base_config(lang, work / name)); });
    trees.push_back(tree_files(work / name));
  }
  std::size_t differing = 0;
  std::string first;
  for (const auto& [name, body] : trees[0]) {
    auto it = trees[1].find(name);
    if (it == trees[1].end() || it->second != body) {
      if (first.empty()) first = name;
      ++differing;
    }
  }
  differing += trees[1].size() > trees[0].size() ? trees[1].size() - trees[0].size() : 0;
  const bool has_manifest = trees[0].count("manifest.json") > 0;
  return {differing == 0 && has_manifest && trees[0].size() == trees[1].size(),
          fmt::format("{} files compared, {} differ{}", trees[0].size(), differing,
                      first.empty() ? "" : ", first " + first)};
}

void find_compares(const nlohmann::json& j, std::vector<nlohmann::json>& out) {
  if (j.is_object()) {
    if (j.contains("better") && j.contains("worse") && j.contains("same") && j.contains("num_words")) out.push_back(j);
    for (const auto& [k, v] : j.items()) find_compares(v, out);
  } else if (j.is_array()) {
    for (const auto& v : j) find_compares(v, out);
  }
}

Verdict compare_identity(const fs::path& work) {
  std::size_t manifests = 0, reports = 0, bad = 0;
  for (const auto& e : fs::recursive_directory_iterator(work)) {
    if (!e.is_regular_file() || e.path().extension() != ".json") continue;
    std::vector<nlohmann::json> found;
    find_compares(nlohmann::json::parse(read_file(e.path())), found);
    if (e.path().filename() == "manifest.json") ++manifests;
    for (const auto& c : found) {
      ++reports;
      if (c["better"].get<std::size_t>() + c["worse"].get<std::size_t>() + c["same"].get<std::size_t>() !=
          c["num_words"].get<std::size_t>()) {
        ++bad;
      }
    }
  }
  return {reports > 0 && bad == 0,
          fmt::format("{} comparison reports across {} manifests, {} violations", reports, manifests, bad)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexloop acceptance suite"};
  fs::path work = "acceptance_work";
  int n_seeds = 5;
  bool keep = false;
  app.add_option("--work", work, "working directory for fixtures and runs");
  app.add_option("--seeds", n_seeds, "number of fixture seeds")->check(CLI::Range(1, 100));
  app.add_flag("--keep", keep, "reuse artifacts from an earlier invocation");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  if (!keep) fs::remove_all(work);
  fs::create_directories(work);
  work = fs::absolute(work);

  try {
    report(1, "Viterbi score equals the enumerated path maximum", viterbi_oracle());
    report(2, "Baum-Welch is monotone with normalized tied emissions", em_oracle());
    report(3, "edit distance equals the brute-force recursion", edit_distance_oracle());

    std::vector<SeedRuns> runs;
    for (int s = 1; s <= n_seeds; ++s) runs.push_back(run_seed(work, static_cast<std::uint64_t>(s)));

    fmt::print("# threshold sweep per k (one value per seed)\n");
    report(4, "learned lexicon shrinks and improves as k grows", threshold_shape(runs));
    report(5, "k=1 retrained G2P beats the baseline by more than 5%", end_to_end(runs));
    report(6, "retrained PER at k=1 is no worse than at k=2", k1_vs_k2(runs));
    report(7, "seed size 50 gains more than seed size 2000", seed_size(runs));
    report(8, "self-training gains most in iteration 1 without regressions", self_training(runs));
    report(9, "noise-free regular language is learned exactly", zero_noise(runs, work));
    report(10, "repeated pipeline runs are byte-identical", determinism(work));
    report(11, "better + worse + same = num_words in every comparison", compare_identity(work));
  } catch (const std::exception& e) {
    fmt::print("FAIL acceptance suite aborted: {}\n", e.what());
    return 2;
  }
  fmt::print("{} of 11 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
