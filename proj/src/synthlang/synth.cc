// src/synthlang/synth.cc

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

#include "lexloop/synthlang/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lexloop/core/error.h"
#include "lexloop/core/io.h"
#include "lexloop/core/text.h"
#include "lexloop/util/rng.h"

namespace lexloop::synthlang {
namespace {

// RNG streams, one per generation step.
enum Stream : std::uint64_t { kRules = 1, kWords = 2, kIrregular = 3, kCorpus = 4, kRanks = 5 };

const std::vector<std::string>& phoneme_pool() {
  static const std::vector<std::string> pool = {
      "p", "b", "t", "d", "k", "g", "f", "v", "s", "z", "S", "Z", "x", "h", "m", "n", "N", "l", "r", "j",
      "w", "a", "e", "i", "o", "u", "@", "E", "O", "I", "U", "V", "{", "A", "3", "Q", "y", "2", "9", "tS"};
  return pool;
}

std::string grapheme_text(int i) {
  return std::string(1, static_cast<char>(i < 26 ? 'a' + i : 'A' + (i - 26)));
}

std::string phoneme_text(int i) {
  const auto& pool = phoneme_pool();
  return i < static_cast<int>(pool.size()) ? pool[i] : "P" + std::to_string(i);
}

template <typename T>
void shuffle(std::vector<T>& v, CounterRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// Unit = one rule application: 1 or 2 graphemes and its phonemes.
struct Unit {
  int width;
  std::size_t phones;
};

std::vector<Unit> segment(const RuleSet& rules, const Word& word) {
  std::vector<Unit> units;
  const auto& g = word.graphemes;
  for (std::size_t i = 0; i < g.size();) {
    if (i + 1 < g.size()) {
      auto it = rules.digraph.find(g[i] + g[i + 1]);
      if (it != rules.digraph.end()) {
        units.push_back({2, it->second.size()});
        i += 2;
        continue;
      }
    }
    auto it = rules.single.find(g[i]);
    if (it == rules.single.end()) throw Error("no rule for grapheme '" + g[i] + "'");
    units.push_back({1, it->second.size()});
    ++i;
  }
  return units;
}

// True when some word-HMM path emits the rule pronunciation unit by unit.
// Every state that is not skipped emits; a digraph keeps one of its two
// states; a skip never passes over two consecutive states.
bool alignable(const std::vector<Unit>& units) {
  // reach[b]: a path exists whose last state is skipped (b = 1) or not.
  bool reach[2] = {true, false};
  for (const Unit& u : units) {
    bool next[2] = {false, false};
    const bool any = reach[0] || reach[1];
    if (u.width == 1) {
      if (u.phones == 0) {
        next[1] = reach[0];
      } else {
        next[0] = any;
      }
    } else {
      next[1] = any;      // first state emits, second skipped
      next[0] = reach[0];  // first skipped, second emits
    }
    reach[0] = next[0];
    reach[1] = next[1];
  }
  return reach[0] || reach[1];
}

RuleSet make_rules(const SynthSpec& spec, CounterRng rng) {
  const int G = spec.n_graphemes, P = spec.n_phonemes;
  std::vector<int> phon(P);
  std::iota(phon.begin(), phon.end(), 0);
  shuffle(phon, rng);

  // Primaries: a distinct phoneme per grapheme while the inventory lasts.
  std::vector<int> primary(G);
  for (int g = 0; g < G; ++g) primary[g] = phon[g % P];
  std::vector<int> extras(phon.begin() + std::min(G, P), phon.end());

  std::vector<int> order(G);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  const int n_silent = spec.n_silent_graphemes;
  const int n_expand =
      std::min({G - n_silent, static_cast<int>(std::lround(0.15 * G)), static_cast<int>(extras.size())});

  RuleSet rules;
  std::vector<bool> silent(G, false);
  std::set<int> expansion_seconds;
  for (int i = 0; i < G; ++i) {
    const int g = order[i];
    Pronunciation pron;
    if (i < n_silent) {
      silent[g] = true;
    } else {
      pron.push_back(phoneme_text(primary[g]));
      if (i < n_silent + n_expand) {
        const int second = extras[i - n_silent];
        pron.push_back(phoneme_text(second));
        expansion_seconds.insert(second);
      }
    }
    rules.single[grapheme_text(g)] = pron;
  }

  // Digraph outputs never reuse an expansion's second phoneme, which would
  // make the boundary after that expansion ambiguous.
  std::vector<int> digraph_phones;
  for (int p = 0; p < P; ++p) {
    if (!expansion_seconds.count(phon[p])) digraph_phones.push_back(phon[p]);
  }
  std::vector<int> pairs(static_cast<std::size_t>(G) * G);
  std::iota(pairs.begin(), pairs.end(), 0);
  shuffle(pairs, rng);
  for (int d = 0; d < spec.n_digraph_rules; ++d) {
    const int a = pairs[d] / G, b = pairs[d] % G;
    const int out = digraph_phones[rng.below(digraph_phones.size())];
    rules.digraph[grapheme_text(a) + grapheme_text(b)] = {phoneme_text(out)};
  }
  return rules;
}

std::string random_word(const SynthSpec& spec, CounterRng& rng) {
  const std::size_t len = 2 + rng.below(7);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += grapheme_text(static_cast<int>(rng.below(spec.n_graphemes)));
  return w;
}

Pronunciation irregular_pron(const Pronunciation& regular, std::size_t graphemes, int n_phonemes,
                             CounterRng& rng) {
  const std::size_t lo = std::max<std::size_t>(1, (graphemes + 1) / 2), hi = 2 * graphemes;
  for (int attempt = 0; attempt < 16; ++attempt) {
    std::int64_t len = static_cast<std::int64_t>(regular.size()) + static_cast<std::int64_t>(rng.below(3)) - 1;
    len = std::clamp<std::int64_t>(len, static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi));
    Pronunciation pron;
    for (std::int64_t i = 0; i < len; ++i) pron.push_back(phoneme_text(static_cast<int>(rng.below(n_phonemes))));
    if (pron != regular) return pron;
  }
  return regular;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_graphemes < 1 || n_graphemes > 52) throw Error("n_graphemes must be in [1,52]");
  if (n_phonemes < 1) throw Error("n_phonemes must be >= 1");
  if (n_silent_graphemes < 0 || n_silent_graphemes >= n_graphemes) throw Error("n_silent_graphemes must be in [0, n_graphemes)");
  if (n_digraph_rules < 0 || n_digraph_rules > n_graphemes * n_graphemes) {
    throw Error("n_digraph_rules must be in [0, n_graphemes^2]");
  }
  if (!(irregularity_rate >= 0.0 && irregularity_rate < 1.0)) throw Error("irregularity_rate must be in [0,1)");
  if (vocab_size < 1 || n_sentences < 1 || n_test_words < 1) throw Error("vocab_size, n_sentences and n_test_words must be >= 1");
  if (!(zipf_exponent >= 0.0)) throw Error("zipf_exponent must be >= 0");
  if (min_sentence_length < 1 || max_sentence_length < min_sentence_length) throw Error("bad sentence length range");
  if (language_tag.empty()) throw Error("empty language tag");
  // Words have 2..8 graphemes.
  double space = 0;
  for (int len = 2; len <= 8; ++len) space += std::pow(static_cast<double>(n_graphemes), len);
  if (static_cast<double>(vocab_size) + n_test_words > space / 2) throw Error("vocabulary too large for the grapheme set");
}

Pronunciation RuleSet::apply(const Word& word) const {
  Pronunciation pron;
  const auto& g = word.graphemes;
  for (std::size_t i = 0; i < g.size();) {
    if (i + 1 < g.size()) {
      auto it = digraph.find(g[i] + g[i + 1]);
      if (it != digraph.end()) {
        pron.insert(pron.end(), it->second.begin(), it->second.end());
        i += 2;
        continue;
      }
    }
    auto it = single.find(g[i]);
    if (it == single.end()) throw Error("no rule for grapheme '" + g[i] + "'");
    pron.insert(pron.end(), it->second.begin(), it->second.end());
    ++i;
  }
  return pron;
}

std::vector<std::string> RuleSet::graphemes() const {
  std::vector<std::string> out;
  for (const auto& [g, p] : single) out.push_back(g);
  return out;
}

std::vector<std::string> RuleSet::phonemes() const {
  std::set<std::string> all;
  for (const auto* m : {&single, &digraph}) {
    for (const auto& [g, p] : *m) all.insert(p.begin(), p.end());
  }
  return {all.begin(), all.end()};
}

SynthLanguage generate_language(const SynthSpec& spec) {
  spec.validate();
  const CounterRng root(spec.seed);
  SynthLanguage lang;
  lang.rules = make_rules(spec, root.split(kRules));

  // Distinct words whose rule pronunciation is non-empty and alignable.
  CounterRng word_rng = root.split(kWords);
  const std::size_t total = static_cast<std::size_t>(spec.vocab_size) + spec.n_test_words;
  std::set<std::string> seen;
  std::vector<std::string> words;
  std::size_t attempts = 0;
  while (words.size() < total) {
    if (++attempts > 1000 * total) throw Error("could not draw enough distinct words");
    std::string w = random_word(spec, word_rng);
    if (seen.count(w)) continue;
    seen.insert(w);
    const Word word = Word::from_surface(w);
    if (lang.rules.apply(word).empty() || !alignable(segment(lang.rules, word))) continue;
    words.push_back(w);
  }

  CounterRng irr_rng = root.split(kIrregular);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Word word = Word::from_surface(words[i]);
    Pronunciation pron = lang.rules.apply(word);
    if (irr_rng.uniform() < spec.irregularity_rate) {
      Pronunciation alt = irregular_pron(pron, word.graphemes.size(), spec.n_phonemes, irr_rng);
      if (alt != pron) {
        pron = std::move(alt);
        lang.irregular.insert(words[i]);
      }
    }
    Lexicon& target = i < static_cast<std::size_t>(spec.vocab_size) ? lang.gold : lang.test;
    target.add(words[i], {pron, Provenance::kSeed, 0});
  }

  // Zipf frequencies over a random ranking of the corpus vocabulary.
  std::vector<std::string> ranked(words.begin(), words.begin() + spec.vocab_size);
  CounterRng rank_rng = root.split(kRanks);
  shuffle(ranked, rank_rng);
  std::vector<double> cdf(ranked.size());
  double acc = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    acc += std::pow(static_cast<double>(r + 1), -spec.zipf_exponent);
    cdf[r] = acc;
  }

  CounterRng corpus_rng = root.split(kCorpus);
  std::vector<std::vector<std::size_t>> sentences(spec.n_sentences);
  std::vector<std::int64_t> uses(ranked.size(), 0);
  const std::size_t span = static_cast<std::size_t>(spec.max_sentence_length - spec.min_sentence_length + 1);
  for (auto& sent : sentences) {
    const std::size_t len = static_cast<std::size_t>(spec.min_sentence_length) + corpus_rng.below(span);
    for (std::size_t i = 0; i < len; ++i) {
      const double u = corpus_rng.uniform() * acc;
      std::size_t r = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      r = std::min(r, ranked.size() - 1);
      sent.push_back(r);
      ++uses[r];
    }
  }
  // Every vocabulary word occurs at least once: an unsampled word takes the
  // place of a random token whose word occurs more than once.
  std::size_t tokens = 0;
  for (const auto& sent : sentences) tokens += sent.size();
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (uses[r] > 0) continue;
    if (tokens < ranked.size()) throw Error("corpus too small to contain the whole vocabulary");
    while (true) {
      auto& sent = sentences[corpus_rng.below(sentences.size())];
      std::size_t& slot = sent[corpus_rng.below(sent.size())];
      if (uses[slot] < 2) continue;
      --uses[slot];
      slot = r;
      ++uses[r];
      break;
    }
  }

  lang.corpus.language_tag = spec.language_tag;
  for (const auto& ids : sentences) {
    Sentence sent;
    sent.phones.emplace();
    for (std::size_t r : ids) {
      const std::string& w = ranked[r];
      sent.words.push_back(w);
      const auto& pron = lang.gold.find(w)->front().pron;
      sent.phones->insert(sent.phones->end(), pron.begin(), pron.end());
    }
    lang.corpus.sentences.push_back(std::move(sent));
  }
  return lang;
}

SeedSplit split_seed(const Lexicon& gold, const Corpus& corpus, const Lexicon& test, const std::vector<int>& sizes) {
  if (sizes.empty()) throw Error("split_seed: no sizes given");
  const int largest = *std::max_element(sizes.begin(), sizes.end());
  for (int n : sizes) {
    if (n < 1) throw Error("split_seed: seed size must be >= 1");
    if (static_cast<std::size_t>(n) > gold.num_words()) {
      throw Error("split_seed: seed size " + std::to_string(n) + " exceeds the " + std::to_string(gold.num_words()) +
                  "-word vocabulary");
    }
  }
  const auto counts = corpus.word_counts();
  std::vector<std::string> ranked = gold.words();
  std::stable_sort(ranked.begin(), ranked.end(), [&](const std::string& a, const std::string& b) {
    const auto ca = counts.count(a) ? counts.at(a) : 0, cb = counts.count(b) ? counts.at(b) : 0;
    return ca > cb;
  });

  SeedSplit split;
  for (int n : sizes) {
    Lexicon seed;
    for (int i = 0; i < n; ++i) {
      for (const auto& e : *gold.find(ranked[i])) seed.add(ranked[i], {e.pron, Provenance::kSeed, 0});
    }
    split.seeds.push_back(std::move(seed));
  }
  std::set<std::string> in_largest(ranked.begin(), ranked.begin() + largest);
  for (const auto& [w, variants] : test.entries()) {
    if (in_largest.count(w)) continue;
    for (const auto& e : variants) split.test.add(w, e);
  }
  if (split.test.empty()) throw Error("split_seed: the test set is empty");
  return split;
}

SeedSplit split_seed(const SynthLanguage& lang, const std::vector<int>& sizes) {
  return split_seed(lang.gold, lang.corpus, lang.test, sizes);
}

void write_rules(const RuleSet& rules, std::ostream& out) {
  out << "#rules v1\n";
  const auto phones = [](const Pronunciation& p) { return p.empty() ? std::string("-") : join(p); };
  for (const auto& [g, p] : rules.single) out << "single\t" << g << '\t' << phones(p) << '\n';
  for (const auto& [g, p] : rules.digraph) out << "digraph\t" << g << '\t' << phones(p) << '\n';
}

RuleSet read_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  RuleSet rules;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!header) {
      if (line != "#rules v1") throw ParseError(path.string(), lineno, "expected '#rules v1'");
      header = true;
      continue;
    }
    bool ok = true;
    auto f = split_fields(line, '\t', &ok);
    if (!ok || f.size() != 3) throw ParseError(path.string(), lineno, "expected kind<TAB>graphemes<TAB>phones");
    Pronunciation pron;
    if (f[2] != "-") {
      pron = split_fields(f[2], ' ', &ok);
      if (!ok) throw ParseError(path.string(), lineno, "bad phoneme list");
    }
    const std::size_t width = split_utf8(f[1]).size();
    if (f[0] == "single" && width == 1) {
      rules.single[f[1]] = pron;
    } else if (f[0] == "digraph" && width == 2) {
      rules.digraph[f[1]] = pron;
    } else {
      throw ParseError(path.string(), lineno, "unknown rule kind or width");
    }
  }
  if (!header) throw ParseError(path.string(), 1, "missing '#rules v1' header");
  return rules;
}

void write_language(const SynthLanguage& lang, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream rules;
  write_rules(lang.rules, rules);
  write_file_atomic(dir / "rules.txt", rules.str());
  write_lexicon(lang.gold, dir / "gold.lex");
  write_lexicon(lang.test, dir / "test.lex");
  write_corpus(lang.corpus, dir / "corpus.txt");
  std::string irregular;
  for (const auto& w : lang.irregular) irregular += w + "\n";
  write_file_atomic(dir / "irregular.txt", irregular);
}

}  // namespace lexloop::synthlang
