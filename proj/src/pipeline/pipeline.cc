// src/pipeline/pipeline.cc

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

#include "lexloop/pipeline/pipeline.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"
#include "lexloop/core/io.h"
#include "lexloop/core/text.h"
#include "lexloop/g2p/g2p_model.h"
#include "lexloop/lexlearn/baum_welch.h"
#include "lexloop/lexlearn/harvest.h"
#include "lexloop/lexlearn/viterbi.h"
#include "lexloop/phonelm/phone_lm.h"
#include "lexloop/recognizer/noisy_channel.h"
#include "lexloop/synthlang/synth.h"
#include "lexloop/util/hash.h"
#include "lexloop/util/rng.h"

namespace lexloop::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// JSON mapping. Field names are part of the output contract.

namespace {

json report_json(const eval::EvalReport& r) {
  return {{"per", r.per},
          {"wer", r.wer},
          {"num_words", r.word_count},
          {"total_ref_phones", r.total_ref_phones},
          {"total_edits", r.total_edits},
          {"skipped", r.skipped}};
}

eval::EvalReport report_from(const json& j) {
  eval::EvalReport r;
  r.per = j.at("per");
  r.wer = j.at("wer");
  r.word_count = j.at("num_words");
  r.total_ref_phones = j.at("total_ref_phones");
  r.total_edits = j.at("total_edits");
  r.skipped = j.at("skipped");
  return r;
}

json compare_json(const eval::CompareReport& r) {
  return {{"num_words", r.num_words}, {"better", r.better}, {"worse", r.worse}, {"same", r.same}};
}

eval::CompareReport compare_from(const json& j) {
  eval::CompareReport r;
  r.num_words = j.at("num_words");
  r.better = j.at("better");
  r.worse = j.at("worse");
  r.same = j.at("same");
  return r;
}

json topology_json(const lexlearn::Topology& t) {
  return {{"loop", t.loop},
          {"advance", t.advance},
          {"skip", t.skip},
          {"enter_first", t.enter_first},
          {"enter_second", t.enter_second}};
}

lexlearn::Topology topology_from(const json& j) {
  lexlearn::Topology t;
  t.loop = j.at("loop");
  t.advance = j.at("advance");
  t.skip = j.at("skip");
  t.enter_first = j.at("enter_first");
  t.enter_second = j.at("enter_second");
  return t;
}

json learning_json(const LearningStats& s) {
  return {{"sentences", s.sentences},       {"em_skipped", s.em_skipped},
          {"align_failed", s.align_failed}, {"empty_spans", s.empty_spans},
          {"harvested_words", s.harvested_words}, {"em_iterations", s.em_iterations},
          {"topology", topology_json(s.topology)}};
}

LearningStats learning_from(const json& j) {
  LearningStats s;
  s.sentences = j.at("sentences");
  s.em_skipped = j.at("em_skipped");
  s.align_failed = j.at("align_failed");
  s.empty_spans = j.at("empty_spans");
  s.harvested_words = j.at("harvested_words");
  s.em_iterations = j.at("em_iterations");
  s.topology = topology_from(j.at("topology"));
  return s;
}

json k_json(const KResult& r) {
  json j = {{"k", r.k},
            {"learned_words", r.learned_words},
            {"dropped_entries", r.dropped_entries},
            {"test", report_json(r.test)},
            {"test_compare", compare_json(r.test_compare)},
            {"rel_reduction", r.rel_reduction}};
  if (r.learned_vs_gold) j["learned_vs_gold"] = report_json(*r.learned_vs_gold);
  if (r.learned_vs_baseline) j["learned_vs_baseline"] = compare_json(*r.learned_vs_baseline);
  return j;
}

KResult k_from(const json& j) {
  KResult r;
  r.k = j.at("k");
  r.learned_words = j.at("learned_words");
  r.dropped_entries = j.at("dropped_entries");
  r.test = report_from(j.at("test"));
  r.test_compare = compare_from(j.at("test_compare"));
  r.rel_reduction = j.at("rel_reduction");
  if (j.contains("learned_vs_gold")) r.learned_vs_gold = report_from(j.at("learned_vs_gold"));
  if (j.contains("learned_vs_baseline")) r.learned_vs_baseline = compare_from(j.at("learned_vs_baseline"));
  return r;
}

json iteration_json(const IterationResult& r) {
  return {{"iteration", r.iteration},
          {"test", report_json(r.test)},
          {"per", r.test.per},
          {"wer", r.test.wer},
          {"validation_per", r.validation_per},
          {"candidate_validation_per", r.candidate_validation_per},
          {"accepted", r.accepted},
          {"rel_reduction", r.rel_reduction}};
}

IterationResult iteration_from(const json& j) {
  IterationResult r;
  r.iteration = j.at("iteration");
  r.test = report_from(j.at("test"));
  r.validation_per = j.at("validation_per");
  r.candidate_validation_per = j.at("candidate_validation_per");
  r.accepted = j.at("accepted");
  r.rel_reduction = j.at("rel_reduction");
  return r;
}

double rel_reduction(double before, double after) { return before > 0 ? (before - after) / before : 0.0; }

// ---------------------------------------------------------------------------
// Stage bookkeeping.

// Runs stages inside one directory. A stage is skipped when its key file
// matches and every artifact exists.
class Stages {
 public:
  Stages(fs::path root, std::string prefix, RunManifest& manifest)
      : root_(std::move(root)), prefix_(std::move(prefix)), manifest_(manifest) {}

  fs::path dir() const { return root_ / prefix_; }
  fs::path path(const std::string& artifact) const { return dir() / artifact; }

  void run(const std::string& name, const std::string& key, const std::vector<std::string>& artifacts,
           const std::function<void()>& body) {
    const std::string full = prefix_.empty() ? name : prefix_ + "/" + name;
    const fs::path key_file = root_ / prefix_ / ".stages" / (name + ".key");
    bool fresh = fs::exists(key_file) && read_file(key_file) == key + "\n";
    for (const auto& a : artifacts) fresh = fresh && fs::exists(path(a));

    StageRecord record{full, key, {}};
    for (const auto& a : artifacts) record.artifacts.push_back(prefix_.empty() ? a : prefix_ + "/" + a);

    const auto start = std::chrono::steady_clock::now();
    if (!fresh) {
      spdlog::info("stage {}: running", full);
      std::error_code ec;
      fs::remove(key_file, ec);
      try {
        body();
      } catch (const StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageError(full, e.what());
      }
      write_file_atomic(key_file, key + "\n");
      manifest_.recomputed.push_back(full);
    } else {
      spdlog::info("stage {}: up to date", full);
    }
    manifest_.stages.push_back(std::move(record));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream(root_ / "timings.tsv", std::ios::app) << full << '\t' << (fresh ? "cached" : "ran") << '\t'
                                                        << fmt::format("{:.3f}", secs) << '\n';
  }

 private:
  fs::path root_;
  std::string prefix_;
  RunManifest& manifest_;
};

std::string key_of(std::initializer_list<std::string_view> parts) {
  Fnv1a h;
  for (auto p : parts) h.field(p);
  return h.hex();
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

std::string lexicon_bytes(const Lexicon& lex) {
  std::ostringstream os;
  write_lexicon(lex, os);
  return os.str();
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }
json read_json(const fs::path& path) { return json::parse(read_file(path)); }

// ---------------------------------------------------------------------------
// Inputs shared by every stage of a run.

struct Context {
  const PipelineConfig& cfg;
  std::string tag;
  Corpus train;
  Corpus decode;
  Lexicon test;
  std::optional<Lexicon> gold;
  std::vector<g2p::TaggedEntry> pretrain;
  std::string train_hash, decode_hash, test_hash, gold_hash, pretrain_hash;

  explicit Context(const PipelineConfig& c) : cfg(c) {}
};

Context load_context(const PipelineConfig& cfg) {
  Context ctx(cfg);
  const std::string train_bytes = read_file(cfg.corpus);
  ctx.train_hash = hash_hex(train_bytes);
  ctx.train = read_corpus(cfg.corpus);
  ctx.tag = ctx.train.language_tag;
  if (cfg.decode_set() == cfg.corpus) {
    ctx.decode = ctx.train;
    ctx.decode_hash = ctx.train_hash;
  } else {
    ctx.decode_hash = hash_hex(read_file(cfg.decode_set()));
    ctx.decode = read_corpus(cfg.decode_set());
  }
  ctx.test_hash = hash_hex(read_file(cfg.test_lexicon));
  ctx.test = read_lexicon(cfg.test_lexicon);
  if (!cfg.gold_lexicon.empty()) {
    ctx.gold_hash = hash_hex(read_file(cfg.gold_lexicon));
    ctx.gold = read_lexicon(cfg.gold_lexicon);
  }

  // Pretraining lexicons never see target-language words.
  std::set<std::string> target;
  if (cfg.exclude_target_vocab) {
    for (const auto* c : {&ctx.train, &ctx.decode}) {
      for (const auto& w : c->vocabulary()) target.insert(w);
    }
    for (const auto& w : ctx.test.words()) target.insert(w);
  }
  Fnv1a h;
  h.field(cfg.exclude_target_vocab ? "exclude" : "keep");
  for (const auto& src : cfg.pretrain) {
    h.field(src.tag).field(read_file(src.lexicon));
    Lexicon lex = read_lexicon(src.lexicon);
    for (const auto& w : target) lex.erase(w);
    auto entries = g2p::tagged_entries(lex, src.tag);
    ctx.pretrain.insert(ctx.pretrain.end(), entries.begin(), entries.end());
  }
  ctx.pretrain_hash = h.hex();
  return ctx;
}

std::string g2p_params_key(const Context& ctx) {
  const auto& c = ctx.cfg;
  return key_of({"g2p", std::to_string(c.g2p_order), std::to_string(c.g2p_em_iters), num(c.lambda),
                 std::to_string(c.g2p_seed), ctx.pretrain_hash, ctx.tag});
}

// Keeps entries some graphone chunking can cover (at most two phonemes per
// grapheme); returns the number dropped.
std::size_t drop_untrainable(Lexicon& lex) {
  Lexicon kept;
  std::size_t dropped = 0;
  for (const auto& [word, variants] : lex.entries()) {
    const std::size_t graphemes = split_utf8(word).size();
    for (const auto& e : variants) {
      if (e.pron.size() <= 2 * graphemes) {
        kept.add(word, e);
      } else {
        ++dropped;
      }
    }
  }
  lex = std::move(kept);
  return dropped;
}

g2p::G2pModel train_model(const Context& ctx, const Lexicon& target) {
  g2p::TrainOptions opts;
  opts.order = ctx.cfg.g2p_order;
  opts.em_iters = ctx.cfg.g2p_em_iters;
  opts.seed = ctx.cfg.g2p_seed;
  auto entries = g2p::tagged_entries(target, ctx.tag);
  if (ctx.pretrain.empty()) return g2p::train_g2p(entries, opts);
  return g2p::fine_tune(ctx.pretrain, entries, ctx.cfg.lambda, opts);
}

std::vector<Word> words_of(const std::vector<std::string>& surfaces) {
  std::vector<Word> out;
  out.reserve(surfaces.size());
  for (const auto& s : surfaces) out.push_back(Word::from_surface(s));
  return out;
}

Lexicon predict_lexicon(const Context& ctx, const g2p::G2pModel& model, const Lexicon& ref) {
  return g2p::apply_g2p(model, ctx.tag, words_of(ref.words()), ctx.cfg.beam).lexicon;
}

// Words missing from a G2P prediction (unknown graphemes) count as fully
// deleted, so systems are always scored on the same word set.
eval::EvalReport score_g2p(const Lexicon& predicted, const Lexicon& ref) {
  return eval::evaluate_lexicon(predicted, ref, eval::MissingPolicy::kAllDeleted);
}

// Scores a prediction by comparison; words the baseline cannot predict are
// left out of the comparison.
eval::CompareReport compare_or_empty(const Lexicon& a, const Lexicon& b, const Lexicon& ref) {
  try {
    return eval::compare_dictionaries(a, b, ref);
  } catch (const Error&) {
    return {};
  }
}

// ---------------------------------------------------------------------------
// Stages.

std::string baseline_stage(Stages& st, const Context& ctx, const Lexicon& seed) {
  const std::string key = key_of({"baseline_g2p", g2p_params_key(ctx), hash_hex(lexicon_bytes(seed))});
  st.run("baseline_g2p", key, {"baseline.g2p", "seed.lex"}, [&] {
    Lexicon trainable = seed;
    drop_untrainable(trainable);
    write_lexicon(seed, st.path("seed.lex"));
    train_model(ctx, trainable).save(st.path("baseline.g2p"));
  });
  return key;
}

struct LearningKeys {
  std::string phone_lm;
  std::string lexlearn;
  std::vector<std::string> per_k;
};

// Transcribes the train set with `annotator`, trains the phone LM, decodes,
// learns the lexicon and retrains a G2P per k. Learned lexicons are pooled
// with `seed`.
LearningKeys learning_stages(Stages& st, const Context& ctx, const fs::path& annotator, const std::string& annotator_key,
                             const Lexicon& seed, const std::vector<int>& ks) {
  const auto& cfg = ctx.cfg;
  LearningKeys keys;

  const std::string train_key = key_of({"train_set", annotator_key, ctx.train_hash, std::to_string(cfg.beam)});
  st.run("train_set", train_key, {"train_g2p.lex", "train_g2p.skipped.tsv"}, [&] {
    const auto model = g2p::G2pModel::load(annotator);
    auto applied = g2p::apply_g2p(model, ctx.tag, words_of(ctx.train.vocabulary()), cfg.beam);
    write_lexicon(applied.lexicon, st.path("train_g2p.lex"));
    std::string skipped;
    for (const auto& [w, why] : applied.skipped) skipped += w + "\t" + why + "\n";
    write_file_atomic(st.path("train_g2p.skipped.tsv"), skipped);
  });

  keys.phone_lm = key_of({"phone_lm", train_key, std::to_string(cfg.lm_order)});
  st.run("phone_lm", keys.phone_lm, {"transcripts.txt", "phone.lm"}, [&] {
    const Lexicon lex = read_lexicon(st.path("train_g2p.lex"));
    Corpus transcripts{ctx.tag, {}};
    std::vector<Pronunciation> seqs;
    for (const auto& s : ctx.train.sentences) {
      Pronunciation phones;
      bool ok = true;
      for (const auto& w : s.words) {
        const auto* v = lex.find(w);
        if (!v) {
          ok = false;
          break;
        }
        phones.insert(phones.end(), v->front().pron.begin(), v->front().pron.end());
      }
      if (!ok) continue;
      seqs.push_back(phones);
      transcripts.sentences.push_back({s.words, std::move(phones)});
    }
    if (seqs.empty()) throw Error("no sentence could be transcribed by the G2P");
    write_corpus(transcripts, st.path("transcripts.txt"));
    phonelm::train_lm(seqs, cfg.lm_order).save(st.path("phone.lm"));
  });

  const std::string decode_key =
      key_of({"decode", keys.phone_lm, ctx.decode_hash, num(cfg.p_sub), num(cfg.p_ins), num(cfg.p_del),
              std::to_string(cfg.noise_seed), std::to_string(cfg.n_candidates)});
  st.run("decode", decode_key, {"decoded.txt"}, [&] {
    const auto lm = phonelm::PhoneLm::load(st.path("phone.lm"));
    recognizer::NoiseModel nm;
    nm.p_sub = cfg.p_sub;
    nm.p_ins = cfg.p_ins;
    nm.p_del = cfg.p_del;
    nm.seed = cfg.noise_seed;
    std::set<std::string> inventory;
    for (const auto& s : ctx.decode.sentences) {
      if (s.phones) inventory.insert(s.phones->begin(), s.phones->end());
    }
    nm.phonemes.assign(inventory.begin(), inventory.end());
    recognizer::DecodeConfig dc;
    dc.n_candidates = cfg.n_candidates;
    dc.lm = &lm;
    write_corpus(recognizer::decode_corpus(nm, dc, ctx.decode), st.path("decoded.txt"));
  });

  const auto& t = cfg.topology;
  keys.lexlearn = key_of({"lexlearn", decode_key, num(t.loop), num(t.advance), num(t.skip), num(t.enter_first),
                          num(t.enter_second), std::to_string(cfg.em_max_iters), num(cfg.em_tol)});
  st.run("lexlearn", keys.lexlearn, {"emissions.txt", "em_trace.tsv", "harvest.tsv", "lexlearn.json"}, [&] {
    const Corpus decoded = read_corpus(st.path("decoded.txt"));
    std::vector<std::string> graphemes, phonemes;
    std::set<std::string> gset, pset;
    for (const auto& s : decoded.sentences) {
      for (const auto& w : s.words) {
        for (auto& g : split_utf8(w)) gset.insert(std::move(g));
      }
      pset.insert(s.phones->begin(), s.phones->end());
    }
    if (pset.empty()) throw Error("decoded corpus contains no phonemes");
    auto table = lexlearn::init_emissions({gset.begin(), gset.end()}, {pset.begin(), pset.end()});
    lexlearn::EmOptions opts;
    opts.max_iters = cfg.em_max_iters;
    opts.tol = cfg.em_tol;
    auto em = lexlearn::em_train(decoded, std::move(table), cfg.topology, opts);
    if (!em.skipped.empty()) spdlog::warn("lexlearn: {} sentences cannot be emitted and were skipped", em.skipped.size());
    em.table.save(st.path("emissions.txt"));

    std::string trace = "iteration\tlog_likelihood\n";
    for (std::size_t i = 0; i < em.log_likelihood.size(); ++i) {
      trace += fmt::format("{}\t{:.17g}\n", i + 1, em.log_likelihood[i]);
    }
    write_file_atomic(st.path("em_trace.tsv"), trace);

    const auto aligned = lexlearn::align_corpus(decoded, em.table, em.topology);
    const auto harvested = lexlearn::harvest(decoded, aligned.sentences);
    lexlearn::write_harvest(harvested.counts, st.path("harvest.tsv"));

    LearningStats stats;
    stats.sentences = decoded.sentences.size();
    stats.em_skipped = em.skipped.size();
    stats.align_failed = aligned.failed;
    stats.empty_spans = harvested.empty_spans;
    stats.harvested_words = harvested.counts.size();
    stats.em_iterations = em.log_likelihood.size();
    stats.topology = em.topology;
    write_json(st.path("lexlearn.json"), learning_json(stats));
  });

  const std::string seed_key = hash_hex(lexicon_bytes(seed));
  for (int k : ks) {
    const std::string ks_ = std::to_string(k);
    const std::string key = key_of({"learn", keys.lexlearn, keys.phone_lm, ks_, seed_key, g2p_params_key(ctx)});
    keys.per_k.push_back(key);
    st.run("learn_k" + ks_, key,
           {"learned_k" + ks_ + ".lex", "pooled_k" + ks_ + ".lex", "g2p_k" + ks_ + ".g2p", "learn_k" + ks_ + ".json"},
           [&] {
             const auto lm = phonelm::PhoneLm::load(st.path("phone.lm"));
             const auto counts = lexlearn::read_harvest(st.path("harvest.tsv"));
             const Lexicon learned = lexlearn::accept_threshold(counts, k, &lm);
             write_lexicon(learned, st.path("learned_k" + ks_ + ".lex"));
             Lexicon pooled = lexlearn::pool_with_seed(learned, seed);
             const std::size_t dropped = drop_untrainable(pooled);
             write_lexicon(pooled, st.path("pooled_k" + ks_ + ".lex"));
             train_model(ctx, pooled).save(st.path("g2p_k" + ks_ + ".g2p"));
             write_json(st.path("learn_k" + ks_ + ".json"), {{"dropped_entries", dropped}});
           });
  }
  return keys;
}

std::vector<std::string> k_names(const std::vector<int>& ks, const std::string& stem, const std::string& ext) {
  std::vector<std::string> out;
  for (int k : ks) out.push_back(stem + std::to_string(k) + ext);
  return out;
}

void write_manifest(const RunManifest& m, const PipelineConfig& cfg) {
  write_file_atomic(cfg.run_dir / "manifest.json", m.to_json() + "\n");
}

// Runs `body`, writing a partial manifest if a stage fails.
template <typename F>
RunManifest guarded(RunManifest m, const PipelineConfig& cfg, F&& body) {
  fs::create_directories(cfg.run_dir);
  try {
    body(m);
  } catch (const StageError& e) {
    m.failed_stage = e.stage();
    m.error = e.what();
    write_manifest(m, cfg);
    throw;
  }
  write_manifest(m, cfg);
  return m;
}

std::string tables_tsv_k(const RunManifest& m) {
  std::string t1 = "k\tnum_words\tper\twer\tbetter\tworse\tsame\n";
  for (const auto& r : m.k_results) {
    if (!r.learned_vs_gold || !r.learned_vs_baseline) continue;
    const auto& c = *r.learned_vs_baseline;
    t1 += fmt::format("{}\t{}\t{:.6f}\t{:.6f}\t{}\t{}\t{}\n", r.k, r.learned_words, r.learned_vs_gold->per,
                      r.learned_vs_gold->wer, c.better, c.worse, c.same);
  }
  return t1;
}

std::string tables_tsv_g2p(const RunManifest& m) {
  std::string t2 = "system\tk\tper\twer\trel_reduction\n";
  if (m.baseline) t2 += fmt::format("baseline\t-\t{:.6f}\t{:.6f}\t0\n", m.baseline->per, m.baseline->wer);
  for (const auto& r : m.k_results) {
    t2 += fmt::format("learned\t{}\t{:.6f}\t{:.6f}\t{:.6f}\n", r.k, r.test.per, r.test.wer, r.rel_reduction);
  }
  return t2;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string RunManifest::to_json() const {
  json j;
  j["kind"] = kind;
  j["config_hash"] = config_hash;
  json stages_j = json::array();
  for (const auto& s : stages) stages_j.push_back({{"name", s.name}, {"key", s.key}, {"artifacts", s.artifacts}});
  j["stages"] = stages_j;
  if (baseline) j["baseline"] = report_json(*baseline);
  if (learning) j["learning"] = learning_json(*learning);
  json ks = json::array();
  for (const auto& r : k_results) ks.push_back(k_json(r));
  j["k_results"] = ks;
  json its = json::array();
  for (const auto& r : iterations) its.push_back(iteration_json(r));
  j["iterations"] = its;
  json sw = json::array();
  for (const auto& r : sweep) {
    sw.push_back({{"seed_size", r.seed_size},
                  {"baseline_per", r.baseline_per},
                  {"per", r.learned_per},
                  {"improvement", r.improvement},
                  {"rel_reduction", r.rel_reduction}});
  }
  j["sweep"] = sw;
  if (!failed_stage.empty()) {
    j["failed_stage"] = failed_stage;
    j["error"] = error;
  }
  return j.dump(2);
}

RunManifest run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  RunManifest init;
  init.kind = "pipeline";
  init.config_hash = config_hash(cfg);
  return guarded(std::move(init), cfg, [&](RunManifest& m) {
    Stages st(cfg.run_dir, "", m);
    Context ctx = [&] {
      try {
        return load_context(cfg);
      } catch (const std::exception& e) {
        throw StageError("load_inputs", e.what());
      }
    }();
    const Lexicon seed = [&] {
      try {
        return read_lexicon(cfg.seed_lexicon);
      } catch (const std::exception& e) {
        throw StageError("load_inputs", e.what());
      }
    }();

    const std::string base_key = baseline_stage(st, ctx, seed);
    const auto keys = learning_stages(st, ctx, st.path("baseline.g2p"), base_key, seed, cfg.k_values);

    std::vector<std::string> artifacts = {"test_baseline.lex", "metrics.json", "table1.tsv", "table2.tsv"};
    for (const auto& a : k_names(cfg.k_values, "test_k", ".lex")) artifacts.push_back(a);
    Fnv1a h;
    h.field("evaluate").field(base_key).field(keys.lexlearn).field(ctx.test_hash).field(ctx.gold_hash);
    h.field(std::to_string(cfg.beam));
    for (const auto& k : keys.per_k) h.field(k);
    st.run("evaluate", h.hex(), artifacts, [&] {
      RunManifest out;
      const auto baseline = g2p::G2pModel::load(st.path("baseline.g2p"));
      const Lexicon base_test = predict_lexicon(ctx, baseline, ctx.test);
      write_lexicon(base_test, st.path("test_baseline.lex"));
      out.baseline = score_g2p(base_test, ctx.test);
      out.learning = learning_from(read_json(st.path("lexlearn.json")));

      const Lexicon base_train = read_lexicon(st.path("train_g2p.lex"));
      for (int k : cfg.k_values) {
        const std::string ks = std::to_string(k);
        KResult r;
        r.k = k;
        const Lexicon learned = read_lexicon(st.path("learned_k" + ks + ".lex"));
        r.learned_words = learned.num_words();
        r.dropped_entries = read_json(st.path("learn_k" + ks + ".json")).at("dropped_entries");
        if (ctx.gold) {
          Lexicon gold_part;
          for (const auto& w : learned.words()) {
            if (const auto* v = ctx.gold->find(w)) gold_part.add(w, v->front());
          }
          r.learned_vs_gold = eval::evaluate_lexicon(learned, gold_part);
          if (!learned.empty()) r.learned_vs_baseline = compare_or_empty(learned, base_train, gold_part);
        }
        const auto model = g2p::G2pModel::load(st.path("g2p_k" + ks + ".g2p"));
        const Lexicon test_pred = predict_lexicon(ctx, model, ctx.test);
        write_lexicon(test_pred, st.path("test_k" + ks + ".lex"));
        r.test = score_g2p(test_pred, ctx.test);
        r.test_compare = compare_or_empty(test_pred, base_test, ctx.test);
        r.rel_reduction = rel_reduction(out.baseline->per, r.test.per);
        out.k_results.push_back(std::move(r));
      }
      json metrics;
      metrics["baseline"] = report_json(*out.baseline);
      metrics["learning"] = learning_json(*out.learning);
      json ks = json::array();
      for (const auto& r : out.k_results) ks.push_back(k_json(r));
      metrics["k_results"] = ks;
      write_json(st.path("metrics.json"), metrics);
      write_file_atomic(st.path("table1.tsv"), tables_tsv_k(out));
      write_file_atomic(st.path("table2.tsv"), tables_tsv_g2p(out));
    });

    const json metrics = read_json(st.path("metrics.json"));
    m.baseline = report_from(metrics.at("baseline"));
    m.learning = learning_from(metrics.at("learning"));
    for (const auto& r : metrics.at("k_results")) m.k_results.push_back(k_from(r));
  });
}

RunManifest run_iterations(const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.iterations == 1) return run_pipeline(cfg);
  RunManifest init;
  init.kind = "iterate";
  init.config_hash = config_hash(cfg);
  return guarded(std::move(init), cfg, [&](RunManifest& m) {
    Context ctx = [&] {
      try {
        return load_context(cfg);
      } catch (const std::exception& e) {
        throw StageError("load_inputs", e.what());
      }
    }();
    Lexicon seed;
    try {
      seed = read_lexicon(cfg.seed_lexicon);
    } catch (const std::exception& e) {
      throw StageError("load_inputs", e.what());
    }

    // Validation split carved from the seed.
    std::vector<std::string> words = seed.words();
    const std::size_t n_val = std::max<std::size_t>(
        static_cast<std::size_t>(cfg.min_validation_words),
        static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(words.size()))));
    if (n_val >= words.size()) {
      throw StageError("split_validation", fmt::format("seed of {} words is too small for a {}-word validation set",
                                                       words.size(), n_val));
    }
    CounterRng rng(cfg.g2p_seed, 0x76616c);
    for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.below(i)]);
    Lexicon validation, seed_train;
    for (std::size_t i = 0; i < words.size(); ++i) {
      Lexicon& dst = i < n_val ? validation : seed_train;
      for (const auto& e : *seed.find(words[i])) dst.add(words[i], e);
    }
    write_lexicon(validation, cfg.run_dir / "validation.lex");

    const auto score = [&](const fs::path& model_path, const Lexicon& ref) {
      return score_g2p(predict_lexicon(ctx, g2p::G2pModel::load(model_path), ref), ref);
    };

    // Iteration 0: the baseline trained on the seed minus validation.
    Stages base(cfg.run_dir, "iter_0", m);
    std::string checkpoint_key = baseline_stage(base, ctx, seed_train);
    fs::path checkpoint = base.path("baseline.g2p");
    IterationResult prev;
    base.run("select", key_of({"select0", checkpoint_key, ctx.test_hash, std::to_string(cfg.beam)}), {"iteration.json"},
             [&] {
               IterationResult r;
               r.iteration = 0;
               r.test = score(checkpoint, ctx.test);
               r.validation_per = r.candidate_validation_per = score(checkpoint, validation).per;
               r.accepted = true;
               write_json(base.path("iteration.json"), iteration_json(r));
             });
    prev = iteration_from(read_json(base.path("iteration.json")));
    m.baseline = prev.test;
    m.iterations.push_back(prev);

    for (int it = 1; it <= cfg.iterations; ++it) {
      Stages st(cfg.run_dir, "iter_" + std::to_string(it), m);
      const auto keys = learning_stages(st, ctx, checkpoint, checkpoint_key, seed_train, {1});
      const std::string select_key = key_of({"select", keys.per_k.front(), checkpoint_key, ctx.test_hash,
                                             std::to_string(cfg.beam), num(prev.validation_per)});
      st.run("select", select_key, {"iteration.json"}, [&] {
        IterationResult r;
        r.iteration = it;
        r.candidate_validation_per = score(st.path("g2p_k1.g2p"), validation).per;
        // Keep the earlier checkpoint unless the new model validates better.
        r.accepted = r.candidate_validation_per < prev.validation_per;
        if (r.accepted) {
          r.validation_per = r.candidate_validation_per;
          r.test = score(st.path("g2p_k1.g2p"), ctx.test);
        } else {
          r.validation_per = prev.validation_per;
          r.test = prev.test;
        }
        r.rel_reduction = rel_reduction(prev.test.per, r.test.per);
        write_json(st.path("iteration.json"), iteration_json(r));
      });
      IterationResult r = iteration_from(read_json(st.path("iteration.json")));
      if (r.accepted) {
        checkpoint = st.path("g2p_k1.g2p");
        checkpoint_key = keys.per_k.front();
      }
      m.iterations.push_back(r);
      prev = r;
    }

    std::string tsv = "iteration\tper\twer\tvalidation_per\taccepted\trel_reduction\n";
    for (const auto& r : m.iterations) {
      tsv += fmt::format("{}\t{:.6f}\t{:.6f}\t{:.6f}\t{}\t{:.6f}\n", r.iteration, r.test.per, r.test.wer,
                         r.validation_per, r.accepted ? 1 : 0, r.rel_reduction);
    }
    write_file_atomic(cfg.run_dir / "iterations.tsv", tsv);
  });
}

RunManifest run_seed_sweep(const PipelineConfig& cfg) {
  cfg.validate();
  if (cfg.seed_sizes.empty()) throw Error("sweep: experiment.seed_sizes is empty");
  if (cfg.gold_lexicon.empty()) throw Error("sweep: paths.gold_lexicon is required to draw seed sets");
  RunManifest init;
  init.kind = "sweep";
  init.config_hash = config_hash(cfg);
  return guarded(std::move(init), cfg, [&](RunManifest& m) {
    synthlang::SeedSplit split;
    try {
      split = synthlang::split_seed(read_lexicon(cfg.gold_lexicon), read_corpus(cfg.corpus),
                                    read_lexicon(cfg.test_lexicon), cfg.seed_sizes);
    } catch (const std::exception& e) {
      throw StageError("split_seed", e.what());
    }
    for (std::size_t i = 0; i < cfg.seed_sizes.size(); ++i) {
      const int n = cfg.seed_sizes[i];
      PipelineConfig sub = cfg;
      sub.run_dir = cfg.run_dir / ("seed_" + std::to_string(n));
      sub.seed_lexicon = sub.run_dir / "seed_input.lex";
      sub.k_values = {1};
      fs::create_directories(sub.run_dir);
      const std::string bytes = lexicon_bytes(split.seeds[i]);
      if (!fs::exists(sub.seed_lexicon) || read_file(sub.seed_lexicon) != bytes) write_file_atomic(sub.seed_lexicon, bytes);
      const RunManifest r = run_pipeline(sub);
      for (auto s : r.stages) {
        s.name = "seed_" + std::to_string(n) + "/" + s.name;
        for (auto& a : s.artifacts) a = "seed_" + std::to_string(n) + "/" + a;
        m.stages.push_back(std::move(s));
      }
      for (const auto& s : r.recomputed) m.recomputed.push_back("seed_" + std::to_string(n) + "/" + s);
      SweepRow row;
      row.seed_size = n;
      row.baseline_per = r.baseline->per;
      row.learned_per = r.k_results.front().test.per;
      row.improvement = row.baseline_per - row.learned_per;
      row.rel_reduction = rel_reduction(row.baseline_per, row.learned_per);
      m.sweep.push_back(row);
    }
    std::string tsv = "seed_size\tbaseline_per\tper\timprovement\trel_reduction\n";
    for (const auto& r : m.sweep) {
      tsv += fmt::format("{}\t{:.6f}\t{:.6f}\t{:.6f}\t{:.6f}\n", r.seed_size, r.baseline_per, r.learned_per,
                         r.improvement, r.rel_reduction);
    }
    write_file_atomic(cfg.run_dir / "sweep.tsv", tsv);
  });
}

std::string format_tables(const RunManifest& m) {
  std::string out;
  const auto pct = [](double v) { return fmt::format("{:.2f}%", 100 * v); };
  if (!m.k_results.empty()) {
    if (m.k_results.front().learned_vs_gold) {
      out += "Learned lexicons\n";
      out += fmt::format("{:>4}  {:>9}  {:>8}  {:>8}  {:>16}  {:>16}  {:>16}\n", "k", "Num Words", "PER", "WER",
                         "Better", "Worse", "Same");
      for (const auto& r : m.k_results) {
        const auto& g = *r.learned_vs_gold;
        const eval::CompareReport c = r.learned_vs_baseline.value_or(eval::CompareReport{});
        const auto cell = [](std::size_t n, double p) { return fmt::format("{} ({:.2f}%)", n, p); };
        out += fmt::format("{:>4}  {:>9}  {:>8}  {:>8}  {:>16}  {:>16}  {:>16}\n", r.k, r.learned_words, pct(g.per),
                           pct(g.wer), cell(c.better, c.better_pct()), cell(c.worse, c.worse_pct()),
                           cell(c.same, c.same_pct()));
      }
      out += "\n";
    }
    out += "G2P on held-out words\n";
    out += fmt::format("{:<10}  {:>4}  {:>8}  {:>8}  {:>14}\n", "System", "k", "PER", "WER", "PER Rel. Red.");
    if (m.baseline) out += fmt::format("{:<10}  {:>4}  {:>8}  {:>8}  {:>14}\n", "Baseline", "-", pct(m.baseline->per), pct(m.baseline->wer), "-");
    for (const auto& r : m.k_results) {
      out += fmt::format("{:<10}  {:>4}  {:>8}  {:>8}  {:>14}\n", "Learned", r.k, pct(r.test.per), pct(r.test.wer),
                         pct(r.rel_reduction));
    }
  }
  if (!m.iterations.empty()) {
    out += fmt::format("{:<10}  {:>8}  {:>8}  {:>10}\n", "Iteration", "PER", "Val PER", "Rel. Red.");
    for (const auto& r : m.iterations) {
      out += fmt::format("{:<10}  {:>8}  {:>8}  {:>10}\n", r.iteration == 0 ? std::string("baseline") : std::to_string(r.iteration),
                         pct(r.test.per), pct(r.validation_per), r.iteration == 0 ? std::string("-") : pct(r.rel_reduction));
    }
  }
  if (!m.sweep.empty()) {
    out += fmt::format("{:>10}  {:>12}  {:>10}  {:>12}\n", "Seed size", "Baseline PER", "PER", "Improvement");
    for (const auto& r : m.sweep) {
      out += fmt::format("{:>10}  {:>12}  {:>10}  {:>12}\n", r.seed_size, pct(r.baseline_per), pct(r.learned_per),
                         pct(r.improvement));
    }
  }
  return out;
}

}  // namespace lexloop::pipeline
