// tools/lexloop.cc

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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "lexloop/core/error.h"
#include "lexloop/core/io.h"
#include "lexloop/core/text.h"
#include "lexloop/eval/metrics.h"
#include "lexloop/g2p/g2p_model.h"
#include "lexloop/lexlearn/baum_welch.h"
#include "lexloop/lexlearn/harvest.h"
#include "lexloop/lexlearn/viterbi.h"
#include "lexloop/phonelm/phone_lm.h"
#include "lexloop/pipeline/config.h"
#include "lexloop/pipeline/pipeline.h"
#include "lexloop/recognizer/noisy_channel.h"
#include "lexloop/synthlang/synth.h"

namespace fs = std::filesystem;
using namespace lexloop;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

// Thrown for argument combinations CLI11 cannot express.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Word> vocabulary_words(const Corpus& corpus) {
  std::vector<Word> words;
  for (const auto& w : corpus.vocabulary()) words.push_back(Word::from_surface(w));
  return words;
}

std::vector<Word> lexicon_words(const Lexicon& lex) {
  std::vector<Word> words;
  for (const auto& w : lex.words()) words.push_back(Word::from_surface(w));
  return words;
}

// Lines of the form tag=path.
std::vector<std::pair<std::string, fs::path>> parse_pretrain(const std::vector<std::string>& items) {
  std::vector<std::pair<std::string, fs::path>> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
      throw UsageError("--pretrain expects tag=path, got '" + item + "'");
    }
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file_atomic(path, text);
  }
}

struct SynthArgs {
  synthlang::SynthSpec spec;
  std::string out;
  std::vector<int> seed_sizes = {50, 500, 2000};
};

void synth_gen(const SynthArgs& a) {
  const auto lang = synthlang::generate_language(a.spec);
  const fs::path dir(a.out);
  synthlang::write_language(lang, dir);
  const auto split = synthlang::split_seed(lang, a.seed_sizes);
  for (std::size_t i = 0; i < a.seed_sizes.size(); ++i) {
    write_lexicon(split.seeds[i], dir / fmt::format("seed_{}.lex", a.seed_sizes[i]));
  }
  // A ready-to-run config next to the data.
  pipeline::PipelineConfig cfg;
  const int default_seed = a.seed_sizes.size() > 1 ? a.seed_sizes[1] : a.seed_sizes.front();
  cfg.seed_lexicon = fmt::format("seed_{}.lex", default_seed);
  cfg.corpus = "corpus.txt";
  cfg.gold_lexicon = "gold.lex";
  cfg.test_lexicon = "test.lex";
  cfg.run_dir = "run";
  cfg.seed_sizes = a.seed_sizes;
  std::ostringstream os;
  pipeline::write_config(cfg, os);
  write_file_atomic(dir / "pipeline.ini", os.str());
  spdlog::info("wrote {} words, {} sentences, {} irregular, {} test words to {}", lang.gold.num_words(),
               lang.corpus.sentences.size(), lang.irregular.size(), lang.test.num_words(), dir.string());
}

struct G2pArgs {
  std::string lexicon, tag = "syn", out;
  std::vector<std::string> pretrain;
  double lambda = 5.0;
  g2p::TrainOptions opts;
};

void train_g2p_cmd(const G2pArgs& a) {
  const auto target = g2p::tagged_entries(read_lexicon(a.lexicon), a.tag);
  g2p::G2pModel model = [&] {
    if (a.pretrain.empty()) return g2p::train_g2p(target, a.opts);
    std::vector<g2p::TaggedEntry> pool;
    for (const auto& [tag, path] : parse_pretrain(a.pretrain)) {
      auto entries = g2p::tagged_entries(read_lexicon(path), tag);
      pool.insert(pool.end(), entries.begin(), entries.end());
    }
    return g2p::fine_tune(pool, target, a.lambda, a.opts);
  }();
  model.save(fs::path(a.out));
  spdlog::info("trained {} graphones over {} entries", model.graphones().size(), target.size());
}

struct ApplyArgs {
  std::string model, tag = "syn", corpus, words, out, skipped;
  int beam = 8;
};

void apply_g2p_cmd(const ApplyArgs& a) {
  if (a.corpus.empty() == a.words.empty()) throw UsageError("apply-g2p needs exactly one of --corpus or --words");
  const auto model = g2p::G2pModel::load(fs::path(a.model));
  const auto vocab = a.corpus.empty() ? lexicon_words(read_lexicon(a.words)) : vocabulary_words(read_corpus(a.corpus));
  const auto result = g2p::apply_g2p(model, a.tag, vocab, a.beam);
  write_lexicon(result.lexicon, fs::path(a.out));
  std::string report;
  for (const auto& [w, why] : result.skipped) report += w + "\t" + why + "\n";
  if (!a.skipped.empty()) write_file_atomic(a.skipped, report);
  spdlog::info("{} words converted, {} skipped", result.lexicon.num_words(), result.skipped.size());
}

struct LmArgs {
  std::string corpus, lexicon, out;
  int order = 5;
};

void train_lm_cmd(const LmArgs& a) {
  const Corpus corpus = read_corpus(a.corpus);
  std::vector<Pronunciation> seqs;
  if (a.lexicon.empty()) {
    for (const auto& s : corpus.sentences) {
      if (!s.phones) throw Error("sentence without phones in " + a.corpus + "; pass --lexicon to transcribe");
      seqs.push_back(*s.phones);
    }
  } else {
    // Transcribe through the lexicon; sentences with unknown words are dropped.
    const Lexicon lex = read_lexicon(a.lexicon);
    std::size_t dropped = 0;
    for (const auto& s : corpus.sentences) {
      Pronunciation phones;
      bool ok = true;
      for (const auto& w : s.words) {
        const auto* v = lex.find(w);
        if (!v || v->empty()) {
          ok = false;
          break;
        }
        phones.insert(phones.end(), v->front().pron.begin(), v->front().pron.end());
      }
      if (ok) seqs.push_back(std::move(phones));
      else ++dropped;
    }
    if (dropped) spdlog::warn("{} sentences dropped for unknown words", dropped);
  }
  const auto lm = phonelm::train_lm(seqs, a.order);
  lm.save(fs::path(a.out));
  spdlog::info("order-{} LM over {} phones, perplexity {:.3f}", lm.order(), lm.vocabulary().size(),
               phonelm::perplexity(lm, seqs));
}

struct DecodeArgs {
  std::string corpus, lm, out;
  recognizer::NoiseModel noise;
  int n_candidates = 4;
};

void decode_cmd(const DecodeArgs& a) {
  const Corpus gold = read_corpus(a.corpus);
  recognizer::NoiseModel nm = a.noise;
  std::set<std::string> inventory;
  for (const auto& s : gold.sentences) {
    if (s.phones) inventory.insert(s.phones->begin(), s.phones->end());
  }
  nm.phonemes.assign(inventory.begin(), inventory.end());
  const auto lm = phonelm::PhoneLm::load(fs::path(a.lm));
  recognizer::DecodeConfig dc{a.n_candidates, &lm};
  write_corpus(recognizer::decode_corpus(nm, dc, gold), fs::path(a.out));
}

struct LearnArgs {
  std::string decoded, lm, out, harvest_out, emissions_out;
  int k = 1, max_iters = 30;
  double tol = 1e-4;
  lexlearn::Topology topology;
};

void learn_cmd(const LearnArgs& a) {
  const Corpus decoded = read_corpus(a.decoded);
  std::set<std::string> graphemes, phonemes;
  for (const auto& s : decoded.sentences) {
    for (const auto& w : s.words) {
      for (auto& g : split_utf8(w)) graphemes.insert(g);
    }
    if (s.phones) phonemes.insert(s.phones->begin(), s.phones->end());
  }
  if (phonemes.empty()) throw Error(a.decoded + " carries no phones");
  auto table = lexlearn::init_emissions({graphemes.begin(), graphemes.end()}, {phonemes.begin(), phonemes.end()});
  lexlearn::EmOptions opts;
  opts.max_iters = a.max_iters;
  opts.tol = a.tol;
  const auto em = lexlearn::em_train(decoded, std::move(table), a.topology, opts);
  if (!em.skipped.empty()) spdlog::warn("{} sentences cannot be emitted and were skipped", em.skipped.size());
  const auto aligned = lexlearn::align_corpus(decoded, em.table, em.topology);
  const auto hv = lexlearn::harvest(decoded, aligned.sentences);
  std::optional<phonelm::PhoneLm> lm;
  if (!a.lm.empty()) lm = phonelm::PhoneLm::load(fs::path(a.lm));
  const Lexicon learned = lexlearn::accept_threshold(hv.counts, a.k, lm ? &*lm : nullptr);
  write_lexicon(learned, fs::path(a.out));
  if (!a.harvest_out.empty()) lexlearn::write_harvest(hv.counts, fs::path(a.harvest_out));
  if (!a.emissions_out.empty()) em.table.save(fs::path(a.emissions_out));
  spdlog::info("EM {} iterations; {} alignments failed, {} empty spans; {} words learned at k={}",
               em.log_likelihood.size(), aligned.failed, hv.empty_spans, learned.num_words(), a.k);
}

struct ReportOpts {
  bool json = false;
  std::string tsv;
};

void eval_cmd(const std::string& hyp, const std::string& ref, const std::string& missing, const ReportOpts& ro) {
  const auto policy = missing == "all-deleted" ? eval::MissingPolicy::kAllDeleted : eval::MissingPolicy::kSkip;
  const auto r = eval::evaluate_lexicon(read_lexicon(hyp), read_lexicon(ref), policy);
  if (ro.json) std::cout << eval::to_json(r) << '\n';
  else eval::print_table(r, std::cout);
  if (!ro.tsv.empty()) {
    std::ostringstream os;
    eval::write_tsv(r, os);
    emit(os.str(), ro.tsv);
  }
}

void compare_cmd(const std::string& a, const std::string& b, const std::string& ref, const ReportOpts& ro) {
  const auto r = eval::compare_dictionaries(read_lexicon(a), read_lexicon(b), read_lexicon(ref));
  if (ro.json) std::cout << eval::to_json(r) << '\n';
  else eval::print_table(r, std::cout);
  if (!ro.tsv.empty()) {
    std::ostringstream os;
    eval::write_tsv(r, os);
    emit(os.str(), ro.tsv);
  }
}

int run_driver(const std::string& config, int kind, int iterations) {
  auto cfg = pipeline::load_config(config);
  if (iterations > 0) cfg.iterations = iterations;
  pipeline::RunManifest m;
  try {
    if (kind == 0) m = pipeline::run_pipeline(cfg);
    else if (kind == 1) m = pipeline::run_iterations(cfg);
    else m = pipeline::run_seed_sweep(cfg);
  } catch (const pipeline::StageError& e) {
    spdlog::error("{}", e.what());
    spdlog::error("partial manifest in {}", (cfg.run_dir / "manifest.json").string());
    return kExitFailure;
  }
  std::cout << pipeline::format_tables(m);
  spdlog::info("{} stages recomputed; manifest {}", m.recomputed.size(), (cfg.run_dir / "manifest.json").string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lexloop: pronunciation learning from decoded phone streams"};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");
  app.add_flag("-q,--quiet", quiet, "Warnings and errors only");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth-gen", "Generate a synthetic language, seed lexicons and a config");
  c_synth->add_option("-o,--out", synth.out, "Output directory")->required();
  c_synth->add_option("--seed", synth.spec.seed, "Random seed");
  c_synth->add_option("--graphemes", synth.spec.n_graphemes, "Grapheme inventory size");
  c_synth->add_option("--phonemes", synth.spec.n_phonemes, "Phoneme inventory size");
  c_synth->add_option("--digraphs", synth.spec.n_digraph_rules, "Digraph rules");
  c_synth->add_option("--silent", synth.spec.n_silent_graphemes, "Silent graphemes");
  c_synth->add_option("--irregularity", synth.spec.irregularity_rate, "Irregular word rate");
  c_synth->add_option("--vocab", synth.spec.vocab_size, "Corpus vocabulary size");
  c_synth->add_option("--zipf", synth.spec.zipf_exponent, "Zipf exponent");
  c_synth->add_option("--min-len", synth.spec.min_sentence_length, "Shortest sentence");
  c_synth->add_option("--max-len", synth.spec.max_sentence_length, "Longest sentence");
  c_synth->add_option("--sentences", synth.spec.n_sentences, "Number of sentences");
  c_synth->add_option("--test-words", synth.spec.n_test_words, "Held-out test words");
  c_synth->add_option("--tag", synth.spec.language_tag, "Language tag");
  c_synth->add_option("--seed-sizes", synth.seed_sizes, "Nested seed lexicon sizes")->delimiter(',');

  G2pArgs g2p_args;
  auto* c_g2p = app.add_subcommand("train-g2p", "Train a graphone G2P model");
  c_g2p->add_option("-l,--lexicon", g2p_args.lexicon, "Target lexicon")->required()->check(CLI::ExistingFile);
  c_g2p->add_option("--tag", g2p_args.tag, "Target language tag");
  c_g2p->add_option("-o,--out", g2p_args.out, "Model file")->required();
  c_g2p->add_option("--order", g2p_args.opts.order, "Graphone n-gram order")->check(CLI::Range(1, 5));
  c_g2p->add_option("--em-iters", g2p_args.opts.em_iters, "Alignment EM iterations");
  c_g2p->add_option("--seed", g2p_args.opts.seed, "Random seed");
  c_g2p->add_option("--pretrain", g2p_args.pretrain, "Extra tagged lexicons, tag=path");
  c_g2p->add_option("--lambda", g2p_args.lambda, "Target weight when pretraining");

  ApplyArgs apply;
  auto* c_apply = app.add_subcommand("apply-g2p", "Generate pronunciations for a vocabulary");
  c_apply->add_option("-m,--model", apply.model, "Model file")->required()->check(CLI::ExistingFile);
  c_apply->add_option("--tag", apply.tag, "Language tag");
  c_apply->add_option("-c,--corpus", apply.corpus, "Corpus whose vocabulary is converted")->check(CLI::ExistingFile);
  c_apply->add_option("-w,--words", apply.words, "Lexicon whose words are converted")->check(CLI::ExistingFile);
  c_apply->add_option("-o,--out", apply.out, "Output lexicon")->required();
  c_apply->add_option("--skipped", apply.skipped, "TSV of words that could not be converted");
  c_apply->add_option("--beam", apply.beam, "Beam width")->check(CLI::PositiveNumber);

  LmArgs lm_args;
  auto* c_lm = app.add_subcommand("train-lm", "Train a phone n-gram LM");
  c_lm->add_option("-c,--corpus", lm_args.corpus, "Corpus")->required()->check(CLI::ExistingFile);
  c_lm->add_option("-l,--lexicon", lm_args.lexicon, "Transcribe the corpus through this lexicon")
      ->check(CLI::ExistingFile);
  c_lm->add_option("-o,--out", lm_args.out, "LM file")->required();
  c_lm->add_option("--order", lm_args.order, "n-gram order")->check(CLI::Range(1, 7));

  DecodeArgs dec;
  auto* c_dec = app.add_subcommand("decode", "Simulate phone recognition over a gold-phone corpus");
  c_dec->add_option("-c,--corpus", dec.corpus, "Corpus with gold phones")->required()->check(CLI::ExistingFile);
  c_dec->add_option("--lm", dec.lm, "Phone LM")->required()->check(CLI::ExistingFile);
  c_dec->add_option("-o,--out", dec.out, "Decoded corpus")->required();
  c_dec->add_option("--p-sub", dec.noise.p_sub, "Substitution rate");
  c_dec->add_option("--p-ins", dec.noise.p_ins, "Insertion rate");
  c_dec->add_option("--p-del", dec.noise.p_del, "Deletion rate");
  c_dec->add_option("--seed", dec.noise.seed, "Noise seed");
  c_dec->add_option("--candidates", dec.n_candidates, "Corruptions ranked by the LM")->check(CLI::PositiveNumber);

  LearnArgs learn;
  auto* c_learn = app.add_subcommand("learn-lexicon", "Align decoded phones to words and harvest a lexicon");
  c_learn->add_option("-d,--decoded", learn.decoded, "Decoded corpus")->required()->check(CLI::ExistingFile);
  c_learn->add_option("-o,--out", learn.out, "Learned lexicon")->required();
  c_learn->add_option("-k", learn.k, "Acceptance threshold")->check(CLI::PositiveNumber);
  c_learn->add_option("--lm", learn.lm, "Phone LM for tie-breaking")->check(CLI::ExistingFile);
  c_learn->add_option("--harvest", learn.harvest_out, "Harvest counts TSV");
  c_learn->add_option("--emissions", learn.emissions_out, "Trained emission table");
  c_learn->add_option("--max-iters", learn.max_iters, "EM iterations");
  c_learn->add_option("--tol", learn.tol, "EM tolerance per sentence");
  c_learn->add_option("--loop", learn.topology.loop, "Self-loop probability");
  c_learn->add_option("--advance", learn.topology.advance, "Advance probability");
  c_learn->add_option("--skip", learn.topology.skip, "Skip probability");
  c_learn->add_option("--enter-first", learn.topology.enter_first, "Entry at the first state");
  c_learn->add_option("--enter-second", learn.topology.enter_second, "Entry at the second state");

  std::string hyp, ref, missing = "skip";
  ReportOpts eval_ro;
  auto* c_eval = app.add_subcommand("eval", "PER and WER of a lexicon against a reference");
  c_eval->add_option("--hyp", hyp, "Hypothesis lexicon")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--ref", ref, "Reference lexicon")->required()->check(CLI::ExistingFile);
  c_eval->add_option("--missing", missing, "Words missing from hyp")->check(CLI::IsMember({"skip", "all-deleted"}));
  c_eval->add_flag("--json", eval_ro.json, "JSON output");
  c_eval->add_option("--tsv", eval_ro.tsv, "Also write TSV ('-' for stdout)");

  std::string dict_a, dict_b, cmp_ref;
  ReportOpts cmp_ro;
  auto* c_cmp = app.add_subcommand("compare", "Better/worse/same counts of dictionary A against B");
  c_cmp->add_option("-a", dict_a, "Dictionary A")->required()->check(CLI::ExistingFile);
  c_cmp->add_option("-b", dict_b, "Dictionary B")->required()->check(CLI::ExistingFile);
  c_cmp->add_option("--ref", cmp_ref, "Reference lexicon")->required()->check(CLI::ExistingFile);
  c_cmp->add_flag("--json", cmp_ro.json, "JSON output");
  c_cmp->add_option("--tsv", cmp_ro.tsv, "Also write TSV ('-' for stdout)");

  std::string config;
  int iterations = 0;
  auto* c_pipe = app.add_subcommand("pipeline", "Run the full pipeline over a config");
  c_pipe->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  auto* c_iter = app.add_subcommand("iterate", "Iterative self-training");
  c_iter->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
  c_iter->add_option("-n,--iterations", iterations, "Override experiment.iterations")->check(CLI::PositiveNumber);
  auto* c_sweep = app.add_subcommand("sweep-seeds", "One pipeline per seed size");
  c_sweep->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  spdlog::set_default_logger(spdlog::default_logger());
  spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);
  spdlog::set_pattern("[%l] %v");

  try {
    if (*c_synth) synth_gen(synth);
    else if (*c_g2p) train_g2p_cmd(g2p_args);
    else if (*c_apply) apply_g2p_cmd(apply);
    else if (*c_lm) train_lm_cmd(lm_args);
    else if (*c_dec) decode_cmd(dec);
    else if (*c_learn) learn_cmd(learn);
    else if (*c_eval) eval_cmd(hyp, ref, missing, eval_ro);
    else if (*c_cmp) compare_cmd(dict_a, dict_b, cmp_ref, cmp_ro);
    else if (*c_pipe) return run_driver(config, 0, 0);
    else if (*c_iter) return run_driver(config, 1, iterations);
    else if (*c_sweep) return run_driver(config, 2, 0);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitOk;
}
