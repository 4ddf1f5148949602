// include/lexloop/synthlang/synth.h

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

#ifndef LEXLOOP_SYNTHLANG_SYNTH_H_
#define LEXLOOP_SYNTHLANG_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lexloop/core/types.h"

namespace lexloop::synthlang {

struct SynthSpec {
  int n_graphemes = 20;
  int n_phonemes = 24;
  int n_digraph_rules = 5;
  // Single graphemes whose rule emits nothing. Their tied emission rows are
  // never observed, so they can absorb neighbouring phonemes during
  // alignment; off by default.
  int n_silent_graphemes = 0;
  double irregularity_rate = 0.05;
  int vocab_size = 2000;
  double zipf_exponent = 1.1;
  int min_sentence_length = 3;
  int max_sentence_length = 10;
  int n_sentences = 20000;
  // Words drawn from the same rules that never occur in the corpus; they
  // form the held-out test lexicon.
  int n_test_words = 500;
  std::uint64_t seed = 1;
  std::string language_tag = "syn";

  /// Throws lexloop::Error on an infeasible spec.
  void validate() const;
};

/// Grapheme-to-phoneme rules applied leftmost-longest: a digraph rule wins
/// over the single-grapheme rule at the same position.
struct RuleSet {
  std::map<std::string, Pronunciation> single;   // grapheme -> 0..2 phonemes
  std::map<std::string, Pronunciation> digraph;  // two graphemes -> 1 phoneme

  Pronunciation apply(const Word& word) const;
  std::vector<std::string> graphemes() const;
  std::vector<std::string> phonemes() const;

  bool operator==(const RuleSet&) const = default;
};

struct SynthLanguage {
  RuleSet rules;
  Lexicon gold;  // every corpus word
  Lexicon test;  // held-out words, disjoint from the corpus
  Corpus corpus;
  std::set<std::string> irregular;  // words of `gold` or `test` not derived from the rules
};

SynthLanguage generate_language(const SynthSpec& spec);

struct SeedSplit {
  std::vector<Lexicon> seeds;  // one per requested size, in the requested order
  Lexicon test;
};

/// Seed lexicons of the given sizes taken from the most frequent corpus words
/// (ties in byte order), so smaller sets nest in larger ones. The test
/// lexicon holds every `test` word that is not in the largest seed. Throws if
/// a size is below 1 or above the number of gold words, or if the test set
/// comes out empty.
SeedSplit split_seed(const Lexicon& gold, const Corpus& corpus, const Lexicon& test, const std::vector<int>& sizes);
SeedSplit split_seed(const SynthLanguage& lang, const std::vector<int>& sizes);

/// `#rules v1`, then `single<TAB>g<TAB>phones` / `digraph<TAB>gh<TAB>phones`;
/// a silent grapheme has `-` for phones.
void write_rules(const RuleSet& rules, std::ostream& out);
RuleSet read_rules(const std::filesystem::path& path);

/// Writes rules.txt, gold.lex, test.lex, corpus.txt and irregular.txt.
void write_language(const SynthLanguage& lang, const std::filesystem::path& dir);

}  // namespace lexloop::synthlang

#endif  // LEXLOOP_SYNTHLANG_SYNTH_H_
