// tests/core_test.cc

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
#include "lexloop/core/symbol_table.h"
#include "lexloop/util/rng.h"
#include "test_util.h"

using namespace lexloop;
using lexloop::testing::make_lexicon;
using lexloop::testing::P;

namespace {

Lexicon parse(const std::string& text) {
  std::istringstream is(text);
  return parse_lexicon(is, "t");
}

std::string serialize(const Lexicon& lex) {
  std::ostringstream os;
  write_lexicon(lex, os);
  return os.str();
}

Corpus parse_c(const std::string& text) {
  std::istringstream is(text);
  return parse_corpus(is, "t");
}

std::string serialize(const Corpus& c) {
  std::ostringstream os;
  write_corpus(c, os);
  return os.str();
}

}  // namespace

TEST_CASE("lexicon line parses into phonemes") {
  const Lexicon lex = parse("cat\tk { t\n");
  REQUIRE(lex.num_words() == 1);
  CHECK(lex.find("cat")->front().pron == P("k { t"));
  CHECK(parse("").empty());
}

TEST_CASE("lexicon comments and blank lines are ignored") {
  const Lexicon lex = parse("# header\n\nab\tA B\n");
  CHECK(lex.num_words() == 1);
}

TEST_CASE("malformed lexicon lines report the line number") {
  try {
    parse("cat\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
  }
  try {
    parse("ab\tA\ncat\t\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse("ab\tA B\nab\tA B\n"), ParseError);
}

TEST_CASE("lexicon serialization is sorted and trailing-newline terminated") {
  CHECK(serialize(Lexicon{}).empty());
  CHECK(serialize(make_lexicon({{"a", "A"}})) == "a\tA\n");
  const Lexicon fwd = make_lexicon({{"ab", "A B"}, {"ba", "B A"}, {"ab", "A"}});
  const Lexicon rev = make_lexicon({{"ab", "A"}, {"ba", "B A"}, {"ab", "A B"}});
  CHECK(serialize(fwd) == serialize(rev));
  CHECK(serialize(fwd) == "ab\tA\nab\tA B\nba\tB A\n");
}

TEST_CASE("provenance and count survive a round trip") {
  Lexicon lex;
  lex.add("ab", {P("A B"), Provenance::kLearned, 7});
  lex.add("cd", {P("C"), Provenance::kG2p, 0});
  lex.add("ef", {P("E"), Provenance::kSeed, 0});
  const std::string text = serialize(lex);
  CHECK(text == "ab\tA B\tlearned:7\ncd\tC\tg2p:0\nef\tE\n");
  CHECK(parse(text) == lex);
}

TEST_CASE("duplicate pairs are rejected by add") {
  Lexicon lex;
  CHECK(lex.add("a", {P("A"), Provenance::kSeed, 0}));
  CHECK_FALSE(lex.add("a", {P("A"), Provenance::kLearned, 3}));
  CHECK(lex.num_entries() == 1);
}

TEST_CASE("random lexicons and corpora round-trip exactly") {
  const std::vector<std::string> letters = {"a", "b", "c", "d"};
  const std::vector<std::string> phones = {"A", "B", "C", "D@", "e:"};
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    CounterRng rng(11, trial);
    Lexicon lex;
    Corpus corpus;
    corpus.language_tag = "t" + std::to_string(trial % 3);
    const std::size_t n = rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      std::string w;
      for (std::size_t j = 0, len = 1 + rng.below(4); j < len; ++j) w += letters[rng.below(letters.size())];
      Pronunciation p;
      for (std::size_t j = 0, len = 1 + rng.below(4); j < len; ++j) p.push_back(phones[rng.below(phones.size())]);
      lex.add(w, {p, static_cast<Provenance>(rng.below(3)), static_cast<std::int64_t>(rng.below(5))});
      Sentence s;
      for (std::size_t j = 0, len = 1 + rng.below(3); j < len; ++j) s.words.push_back(w);
      if (rng.below(2)) s.phones = p;
      corpus.sentences.push_back(s);
    }
    CHECK(parse(serialize(lex)) == lex);
    CHECK(serialize(parse(serialize(lex))) == serialize(lex));
    CHECK(parse_c(serialize(corpus)) == corpus);
  }
}

TEST_CASE("corpus lines with and without phones") {
  const Corpus c = parse_c("#lang=xx\nab ba\tA B B A\nab\n");
  CHECK(c.language_tag == "xx");
  REQUIRE(c.sentences.size() == 2);
  CHECK(c.sentences[0].words.size() == 2);
  CHECK(c.sentences[0].phones->size() == 4);
  CHECK_FALSE(c.sentences[1].phones.has_value());
  CHECK(c.vocabulary() == std::vector<std::string>{"ab", "ba"});
  CHECK(c.word_counts().at("ab") == 2);
}

TEST_CASE("corpus errors") {
  CHECK_THROWS_AS(parse_c("ab\tA B\n"), Error);
  CHECK_THROWS_AS(parse_c("#lang=xx\nab  ba\n"), ParseError);
  CHECK_THROWS_AS(parse_c("#lang=xx\n\tA\n"), ParseError);
}

TEST_CASE("symbol interning is stable and bijective") {
  SymbolTable t;
  const auto a = t.intern("a"), b = t.intern("b");
  CHECK(a != b);
  CHECK(t.intern("a") == a);
  CHECK(t.text(b) == "b");
  CHECK(*t.find("b") == b);
  CHECK_FALSE(t.find("c").has_value());
  CHECK_FALSE(is_valid_symbol("a b"));
  CHECK_FALSE(is_valid_symbol(""));
}

TEST_CASE("utf8 splitting yields scalars") {
  CHECK(split_utf8("ab") == std::vector<std::string>{"a", "b"});
  CHECK(split_utf8("\xc3\xa9t\xc3\xa9").size() == 3);
  CHECK(Word::from_surface("\xc3\xa9t").graphemes.size() == 2);
}

TEST_CASE("counter rng streams are pure functions of their key") {
  CounterRng a(5, 3), b(5, 3), c(5, 4);
  const auto x = a.next_u64();
  CHECK(x == b.next_u64());
  CHECK(x != c.next_u64());
  // Children are keyed by the parent's key, not its seed.
  CHECK(CounterRng(5).split(3).next_u64() == CounterRng(5).split(3).next_u64());
  CHECK(CounterRng(5).split(3).next_u64() != CounterRng(5).split(4).next_u64());
  CHECK(CounterRng(5).split(3).next_u64() != CounterRng(6).split(3).next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK((u >= 0.0 && u < 1.0));
  }
}
