// tests/synth_test.cc

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

#include <sstream>

#include "doctest.h"
#include "lexloop/core/error.h"
#include "lexloop/core/io.h"
#include "lexloop/synthlang/synth.h"
#include "test_util.h"

using namespace lexloop;
using namespace lexloop::synthlang;

namespace {

SynthSpec small_spec(std::uint64_t seed) {
  SynthSpec s;
  s.vocab_size = 500;
  s.n_sentences = 3000;
  s.n_test_words = 100;
  s.seed = seed;
  return s;
}

std::string dump(const SynthLanguage& l) {
  std::ostringstream os;
  write_rules(l.rules, os);
  write_lexicon(l.gold, os);
  write_lexicon(l.test, os);
  write_corpus(l.corpus, os);
  return os.str();
}

}  // namespace

TEST_CASE("generation is deterministic under the seed") {
  CHECK(dump(generate_language(small_spec(3))) == dump(generate_language(small_spec(3))));
  CHECK(dump(generate_language(small_spec(3))) != dump(generate_language(small_spec(4))));
}

TEST_CASE("regular words are reproduced by the rules") {
  auto spec = small_spec(5);
  spec.irregularity_rate = 0.0;
  const auto lang = generate_language(spec);
  CHECK(lang.irregular.empty());
  for (const auto* lex : {&lang.gold, &lang.test}) {
    for (const auto& [w, v] : lex->entries()) CHECK(lang.rules.apply(Word::from_surface(w)) == v.front().pron);
  }
}

TEST_CASE("irregular fraction matches the rate") {
  SynthSpec spec;
  spec.vocab_size = 2000;
  spec.n_sentences = 20000;
  const auto lang = generate_language(spec);
  std::size_t in_gold = 0;
  for (const auto& w : lang.irregular) in_gold += lang.gold.contains(w);
  CHECK(in_gold >= 80);
  CHECK(in_gold <= 120);
  for (const auto& [w, v] : lang.gold.entries()) {
    if (!lang.irregular.count(w)) CHECK(lang.rules.apply(Word::from_surface(w)) == v.front().pron);
  }
}

TEST_CASE("word shapes and corpus consistency") {
  const auto lang = generate_language(small_spec(6));
  CHECK(lang.gold.num_words() == 500);
  CHECK(lang.corpus.vocabulary().size() == 500);
  for (const auto& w : lang.gold.words()) {
    const auto n = Word::from_surface(w).graphemes.size();
    CHECK((n >= 2 && n <= 8));
    CHECK_FALSE(lang.test.contains(w));
  }
  for (const auto& s : lang.corpus.sentences) {
    CHECK((s.words.size() >= 3 && s.words.size() <= 10));
    Pronunciation concat;
    for (const auto& w : s.words) {
      const auto& p = lang.gold.find(w)->front().pron;
      concat.insert(concat.end(), p.begin(), p.end());
    }
    CHECK(concat == *s.phones);
  }
}

TEST_CASE("zipf sampling skews frequencies") {
  const auto lang = generate_language(small_spec(7));
  std::vector<std::int64_t> counts;
  for (const auto& [w, c] : lang.corpus.word_counts()) counts.push_back(c);
  std::sort(counts.rbegin(), counts.rend());
  CHECK(counts.front() > 20 * counts[counts.size() / 2]);
  CHECK(counts.back() >= 1);
}

TEST_CASE("seed sets are nested and frequency ordered") {
  const auto lang = generate_language(small_spec(8));
  const auto split = split_seed(lang, {50, 100, 200});
  REQUIRE(split.seeds.size() == 3);
  CHECK(split.seeds[0].num_words() == 50);
  for (std::size_t i = 1; i < 3; ++i) {
    for (const auto& w : split.seeds[i - 1].words()) CHECK(split.seeds[i].contains(w));
  }
  const auto counts = lang.corpus.word_counts();
  std::string top;
  std::int64_t top_count = -1;
  for (const auto& [w, c] : counts) {
    if (c > top_count) top = w, top_count = c;
  }
  CHECK(split.seeds[0].contains(top));
  for (const auto& w : split.test.words()) CHECK_FALSE(split.seeds[2].contains(w));
}

TEST_CASE("split errors") {
  const auto lang = generate_language(small_spec(9));
  CHECK_THROWS_AS(split_seed(lang, {501}), Error);
  CHECK_THROWS_AS(split_seed(lang, {}), Error);
  // Scoring on the corpus words themselves leaves nothing once every word is seed.
  CHECK_THROWS_AS(split_seed(lang.gold, lang.corpus, lang.gold, {500}), Error);
}

TEST_CASE("SynthSpec validation rejects infeasible settings") {
  SynthSpec s;
  s.n_digraph_rules = 401;
  CHECK_THROWS_AS(generate_language(s), Error);
  s = SynthSpec{};
  s.irregularity_rate = 1.0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("rules and language files round-trip") {
  lexloop::testing::TempDir dir("synth");
  const auto lang = generate_language(small_spec(10));
  write_language(lang, dir.path());
  CHECK(read_rules(dir / "rules.txt") == lang.rules);
  CHECK(read_lexicon(dir / "gold.lex") == lang.gold);
  CHECK(read_corpus(dir / "corpus.txt") == lang.corpus);
}
