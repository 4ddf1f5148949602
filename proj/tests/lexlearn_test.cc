// tests/lexlearn_test.cc

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

#include <cmath>

#include "doctest.h"
#include "lexloop/core/error.h"
#include "lexloop/lexlearn/baum_welch.h"
#include "lexloop/lexlearn/emission_table.h"
#include "lexloop/lexlearn/harvest.h"
#include "lexloop/lexlearn/hmm.h"
#include "lexloop/lexlearn/viterbi.h"
#include "lexloop/phonelm/phone_lm.h"
#include "oracles.h"
#include "test_util.h"

using namespace lexloop;
using namespace lexloop::lexlearn;
using lexloop::testing::P;

namespace {

constexpr double kEps = EmissionTable::kFloor;

Corpus corpus_of(std::initializer_list<std::pair<std::string, std::string>> rows) {
  Corpus c;
  c.language_tag = "xx";
  for (const auto& [words, phones] : rows) {
    Sentence s;
    s.words = P(words);
    s.phones = P(phones);
    c.sentences.push_back(s);
  }
  return c;
}

// Row with `peak` on one phoneme and the rest spread evenly.
std::vector<double> peaked(std::size_t n, std::size_t at, double peak) {
  std::vector<double> row(n, (1.0 - peak) / static_cast<double>(n - 1));
  row[at] = peak;
  return row;
}

}  // namespace

TEST_CASE("init_emissions is uniform") {
  const auto t = init_emissions({"a", "b"}, {"A", "B", "C", "D"});
  for (SymbolId g = 0; g < 2; ++g) {
    for (double v : t.row(g)) CHECK(v == doctest::Approx(0.25));
  }
  const auto one = init_emissions({"a"}, {"A"});
  CHECK(one.prob("a", "A") == 1.0);
  CHECK_THROWS_AS(init_emissions({}, {"A"}), Error);
  CHECK_THROWS_AS(init_emissions({"a"}, {}), Error);
}

TEST_CASE("floored ML pins small counts at the floor") {
  const std::vector<double> counts = {10.0, 0.0, 0.0, 0.0};
  const auto row = floored_ml_distribution(counts, kEps);
  CHECK(row[0] == doctest::Approx(1.0 - 3 * kEps).epsilon(1e-15));
  for (int i = 1; i < 4; ++i) CHECK(row[i] == kEps);
  const auto free = floored_ml_distribution(std::vector<double>{1.0, 3.0}, kEps);
  CHECK(free[0] == doctest::Approx(0.25));
}

TEST_CASE("topology validation") {
  Topology t;
  CHECK_NOTHROW(t.validate());
  t.loop = 0.5;
  CHECK_THROWS_AS(t.validate(), Error);
  t = Topology{};
  t.enter_second = 0.5;
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("sentence HMM concatenates words and shares grapheme rows") {
  const auto table = init_emissions({"a", "b"}, {"A"});
  const auto hmm = SentenceHmm::build({"ab", "ba", "a"}, table);
  CHECK(hmm.num_states() == 5);
  CHECK(hmm.num_words() == 3);
  CHECK(hmm.word_length(1) == 2);
  CHECK(hmm.state_grapheme[0] == hmm.state_grapheme[3]);
  CHECK(hmm.state_grapheme[0] == hmm.state_grapheme[4]);
  CHECK_THROWS_AS(SentenceHmm::build({"ac"}, table), Error);
  CHECK_THROWS_AS(SentenceHmm::build({}, table), Error);
}

TEST_CASE("viterbi on a three-state lattice") {
  auto table = init_emissions({"a", "b", "c"}, {"A", "B", "C"});
  for (SymbolId g = 0; g < 3; ++g) table.set_row(g, peaked(3, static_cast<std::size_t>(g), 0.98));
  const auto al = viterbi_align({"ab", "c"}, P("A B C"), table, Topology{});
  REQUIRE(al.spans.size() == 2);
  CHECK(al.spans[0] == WordSpan{0, 2});
  CHECK(al.spans[1] == WordSpan{2, 3});
  CHECK(al.states == std::vector<int>{0, 1, 2});
  // Hand score: enter 0, emit, advance, emit, advance out, enter 0, emit, advance out.
  const Topology t;
  const double hand = std::log(t.enter_first * 0.98 * t.advance * 0.98 * t.advance * t.enter_first * 0.98 *
                               t.advance);
  CHECK(al.log_score == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("viterbi single word, single phone") {
  const auto table = init_emissions({"a"}, {"A", "B"});
  const auto al = viterbi_align({"a"}, P("A"), table, Topology{});
  CHECK(al.spans == std::vector<WordSpan>{{0, 1}});
}

TEST_CASE("viterbi tie between two one-letter words prefers advance over pass-through") {
  // a emits A and b is passed through, or a is passed through and b emits A:
  // both paths score e0 * E * adv * e1 under uniform emissions. Passing
  // through a one-state word is a skip, so the path advancing into b wins.
  const auto table = init_emissions({"a", "b"}, {"A", "B"});
  const Topology t;
  oracle::PathEnumerator en({"a", "b"}, P("A"), table, t);
  en.run();
  CHECK(en.best_for({0}) == doctest::Approx(en.best_for({1})).epsilon(1e-15));
  const auto al = viterbi_align({"a", "b"}, P("A"), table, t);
  CHECK(al.states == std::vector<int>{1});
  CHECK(al.spans[0].empty());
  CHECK(al.spans[1] == WordSpan{0, 1});
}

TEST_CASE("viterbi one word of two graphemes and one phone") {
  // Enter at 0 then skip out (e0 * skip) beats entering at 1 (e1 * adv).
  const auto table = init_emissions({"a", "b"}, {"A"});
  const auto al = viterbi_align({"ab"}, P("A"), table, Topology{});
  CHECK(al.states == std::vector<int>{0});
  CHECK(al.log_score == doctest::Approx(std::log(0.9 * 0.1)));
}

TEST_CASE("viterbi with no legal path throws") {
  const auto table = init_emissions({"a", "b"}, {"A"});
  CHECK_THROWS_AS(viterbi_align({"ab", "a"}, P(""), table, Topology{}), AlignmentError);
  Topology no_loop;
  no_loop.loop = 0.0;
  no_loop.advance = 0.9;
  CHECK_THROWS_AS(viterbi_align({"a"}, P("A A"), table, no_loop), AlignmentError);
}

TEST_CASE("viterbi matches exhaustive path enumeration") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    CounterRng rng(2024, i);
    const auto inst = oracle::random_instance(rng, 4, 10, 10);
    oracle::PathEnumerator en(inst.words, inst.phones, inst.table, inst.topology);
    en.run();
    if (en.num_paths() == 0) {
      CHECK_THROWS_AS(viterbi_align(inst.words, inst.phones, inst.table, inst.topology), AlignmentError);
      continue;
    }
    const auto al = viterbi_align(inst.words, inst.phones, inst.table, inst.topology);
    CHECK(std::abs(al.log_score - en.max_score()) <= 1e-9);
    CHECK(std::abs(en.best_for(al.states) - en.max_score()) <= 1e-9);
    // Spans tile the phones in order.
    std::size_t pos = 0;
    for (const auto& s : al.spans) {
      CHECK(s.begin == pos);
      pos = s.end;
    }
    CHECK(pos == inst.phones.size());
  }
}

TEST_CASE("forward likelihood equals the enumerated path sum") {
  for (std::uint64_t i = 0; i < 100; ++i) {
    CounterRng rng(77, i);
    const auto inst = oracle::random_instance(rng, 3, 7, 8);
    oracle::PathEnumerator en(inst.words, inst.phones, inst.table, inst.topology);
    en.run();
    const auto hmm = SentenceHmm::build(inst.words, inst.table);
    const double ll = sentence_log_likelihood(hmm, phoneme_ids(inst.phones, inst.table), inst.table, inst.topology);
    if (en.num_paths() == 0) {
      CHECK(std::isinf(ll));
    } else {
      CHECK(ll == doctest::Approx(en.log_total()).epsilon(1e-10));
    }
  }
}

TEST_CASE("EM separates a and b on the two-sentence corpus") {
  const Corpus c = corpus_of({{"ab", "A B"}, {"ba", "B A"}});
  EmOptions opts;
  opts.tol = 0;
  const auto r = em_train(c, init_emissions({"a", "b"}, {"A", "B"}), Topology{}, opts);
  CHECK(r.table.prob("a", "A") > 1 - 1e-4);
  CHECK(r.table.prob("b", "B") > 1 - 1e-4);
  // At the fixed point the best enumerated path aligns each letter to its phone.
  oracle::PathEnumerator en({"ab"}, P("A B"), r.table, r.topology);
  en.run();
  CHECK(en.best_for({0, 1}) == doctest::Approx(en.max_score()));
}

TEST_CASE("EM on a single one-path sentence reaches the floor in one step") {
  const Corpus c = corpus_of({{"a", "A"}});
  EmOptions opts;
  opts.max_iters = 1;
  const auto r = em_train(c, init_emissions({"a"}, {"A", "B", "C"}), Topology{}, opts);
  CHECK(r.table.prob("a", "A") == doctest::Approx(1.0 - 2 * kEps).epsilon(1e-14));
  CHECK(r.table.prob("a", "B") == kEps);
}

TEST_CASE("EM with zero iterations returns the table unchanged") {
  const Corpus c = corpus_of({{"ab", "A B"}});
  const auto t0 = init_emissions({"a", "b"}, {"A", "B"});
  EmOptions opts;
  opts.max_iters = 0;
  const auto r = em_train(c, t0, Topology{}, opts);
  CHECK(r.table == t0);
  CHECK(r.topology == Topology{});
}

TEST_CASE("EM skips sentences no path can emit") {
  Topology t;
  t.loop = 0;
  t.advance = 0.9;
  const Corpus c = corpus_of({{"ab", "A B"}, {"a", "A A A"}});
  const auto r = em_train(c, init_emissions({"a", "b"}, {"A", "B"}), t);
  CHECK(r.skipped == std::vector<std::size_t>{1});
  const Corpus bad = corpus_of({{"ac", "A"}});
  CHECK_THROWS_AS(em_train(bad, init_emissions({"a", "b"}, {"A", "B"}), Topology{}), Error);
}

TEST_CASE("EM log-likelihood never decreases and rows stay normalized") {
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    CounterRng rng(5, trial);
    Corpus c;
    c.language_tag = "xx";
    for (int s = 0; s < 6; ++s) {
      const auto inst = oracle::random_instance(rng, 3, 8, 9);
      c.sentences.push_back({inst.words, inst.phones});
    }
    EmOptions opts;
    opts.tol = 0;
    opts.max_iters = 15;
    const auto r = em_train(c, init_emissions({"a", "b", "c", "d"}, {"A", "B", "C"}), Topology{}, opts);
    for (std::size_t i = 1; i < r.log_likelihood.size(); ++i) {
      CHECK(r.log_likelihood[i] >= r.log_likelihood[i - 1] - 1e-8);
    }
    for (SymbolId g = 0; g < 4; ++g) {
      double sum = 0;
      for (double v : r.table.row(g)) {
        CHECK(v >= kEps * (1 - 1e-12));
        sum += v;
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
    CHECK_NOTHROW(r.topology.validate());
  }
}

TEST_CASE("harvest counts non-empty spans only") {
  const Corpus c = corpus_of({{"ab c", "A B C"}, {"ab c", "A B C"}, {"c ab", "C A"}});
  std::vector<std::optional<Alignment>> al(3);
  al[0] = Alignment{{{0, 2}, {2, 3}}, {0, 1, 2}, 0};
  al[1] = Alignment{{{0, 2}, {2, 3}}, {0, 1, 2}, 0};
  al[2] = Alignment{{{0, 2}, {2, 2}}, {0, 1}, 0};
  const auto h = harvest(c, al);
  CHECK(h.counts.at("ab").at(P("A B")) == 2);
  CHECK(h.counts.at("c").at(P("C")) == 2);
  CHECK(h.counts.at("c").at(P("C A")) == 1);
  CHECK(h.counts.at("ab").size() == 1);
  CHECK(h.empty_spans == 1);
  al.pop_back();
  CHECK_THROWS_AS(harvest(c, al), Error);
}

TEST_CASE("acceptance threshold keeps the modal pronunciation") {
  HarvestCounts counts;
  counts["w"][P("A")] = 3;
  counts["w"][P("B")] = 1;
  const auto k2 = accept_threshold(counts, 2);
  REQUIRE(k2.num_words() == 1);
  CHECK(k2.find("w")->front().pron == P("A"));
  CHECK(k2.find("w")->front().count == 3);
  CHECK(k2.find("w")->front().provenance == Provenance::kLearned);
  CHECK(accept_threshold(counts, 4).empty());
  CHECK_THROWS_AS(accept_threshold(counts, 0), Error);
}

TEST_CASE("acceptance ties go to the LM, else byte order") {
  HarvestCounts counts;
  counts["w"][P("B B")] = 2;
  counts["w"][P("A B")] = 2;
  CHECK(accept_threshold(counts, 1).find("w")->front().pron == P("A B"));
  const auto lm = phonelm::train_lm({P("B B"), P("B B"), P("A")}, 2);
  CHECK(lm.logprob(P("B B")) > lm.logprob(P("A B")));
  CHECK(accept_threshold(counts, 1, &lm).find("w")->front().pron == P("B B"));
}

TEST_CASE("threshold word sets are nested") {
  HarvestCounts counts;
  CounterRng rng(3);
  for (int w = 0; w < 50; ++w) {
    for (int v = 0, n = 1 + static_cast<int>(rng.below(3)); v < n; ++v) {
      counts["w" + std::to_string(w)][P(std::string(1, static_cast<char>('A' + v)))] =
          1 + static_cast<std::int64_t>(rng.below(9));
    }
  }
  for (int k = 1; k < 10; ++k) {
    const auto a = accept_threshold(counts, k), b = accept_threshold(counts, k + 1);
    CHECK(b.num_words() <= a.num_words());
    for (const auto& w : b.words()) CHECK(a.contains(w));
  }
  // k = 1 admits every harvested word.
  CHECK(accept_threshold(counts, 1).num_words() == counts.size());
}

TEST_CASE("pooling lets the seed win conflicts") {
  using lexloop::testing::make_lexicon;
  const Lexicon seed = make_lexicon({{"a", "A"}, {"b", "B"}});
  const Lexicon learned = make_lexicon({{"b", "X"}, {"c", "C"}}, Provenance::kLearned);
  const Lexicon pooled = pool_with_seed(learned, seed);
  CHECK(pooled.num_words() == 3);
  CHECK(pooled.find("b")->size() == 1);
  CHECK(pooled.find("b")->front().pron == P("B"));
  CHECK(pool_with_seed(Lexicon{}, seed) == seed);
}

TEST_CASE("harvest dump round-trips") {
  lexloop::testing::TempDir dir("harvest");
  HarvestCounts counts;
  counts["ab"][P("A B")] = 4;
  counts["ab"][P("A")] = 1;
  counts["c"][P("C")] = 2;
  write_harvest(counts, dir / "h.tsv");
  CHECK(read_harvest(dir / "h.tsv") == counts);
}

TEST_CASE("emission table serialization round-trips") {
  CounterRng rng(9);
  auto t = init_emissions({"a", "b"}, {"A", "B", "C"});
  t.set_row(1, oracle::random_row(rng, 3));
  std::ostringstream os;
  t.save(os);
  std::istringstream is(os.str());
  CHECK(EmissionTable::load(is) == t);
}
