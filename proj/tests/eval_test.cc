// tests/eval_test.cc

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
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lexloop/core/error.h"
#include "lexloop/eval/metrics.h"
#include "lexloop/util/rng.h"
#include "oracles.h"
#include "test_util.h"

using namespace lexloop;
using namespace lexloop::eval;
using lexloop::testing::make_lexicon;
using lexloop::testing::P;

namespace {

// All sequences of length <= max_len over the alphabet.
std::vector<Pronunciation> all_sequences(const std::vector<std::string>& alphabet, std::size_t max_len) {
  std::vector<Pronunciation> out = {{}};
  std::vector<Pronunciation> layer = {{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Pronunciation> next;
    for (const auto& s : layer) {
      for (const auto& a : alphabet) {
        auto t = s;
        t.push_back(a);
        next.push_back(t);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("edit distance examples") {
  CHECK(edit_distance(P("k a t"), P("k a t")) == 0);
  CHECK(edit_distance(P("k a t"), P("k a d")) == 1);
  CHECK(edit_distance(P("t e s t"), P("t E s t s")) == 2);
  CHECK(edit_distance(P(""), P("a b")) == 2);
}

TEST_CASE("edit distance matches the recursive oracle exhaustively") {
  const auto seqs = all_sequences({"a", "b", "c"}, 4);
  for (const auto& a : seqs) {
    for (const auto& b : seqs) REQUIRE(edit_distance(a, b) == oracle::edit_distance(a, b));
  }
}

TEST_CASE("edit distance is a metric on random pairs") {
  CounterRng rng(17);
  const std::vector<std::string> alpha = {"a", "b", "c", "d"};
  auto draw = [&] {
    Pronunciation p;
    for (std::size_t i = 0, n = rng.below(7); i < n; ++i) p.push_back(alpha[rng.below(4)]);
    return p;
  };
  for (int i = 0; i < 300; ++i) {
    const auto a = draw(), b = draw(), c = draw();
    CHECK(edit_distance(a, b) == oracle::edit_distance(a, b));
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
  }
}

TEST_CASE("evaluate_lexicon arithmetic") {
  const Lexicon ref = make_lexicon({{"cat", "k a t"}});
  auto r = evaluate_lexicon(ref, ref);
  CHECK(r.per == 0.0);
  CHECK(r.wer == 0.0);
  r = evaluate_lexicon(make_lexicon({{"cat", "k a d"}}), ref);
  CHECK(r.per == doctest::Approx(1.0 / 3));
  CHECK(r.wer == 1.0);
  CHECK(r.total_edits == 1);
  CHECK(r.total_ref_phones == 3);
}

TEST_CASE("missing words follow the policy") {
  const Lexicon ref = make_lexicon({{"ab", "A B"}, {"cd", "C D E"}});
  const Lexicon hyp = make_lexicon({{"ab", "A B"}});
  const auto skip = evaluate_lexicon(hyp, ref, MissingPolicy::kSkip);
  CHECK(skip.per == 0.0);
  CHECK(skip.word_count == 1);
  CHECK(skip.skipped == 1);
  const auto del = evaluate_lexicon(hyp, ref, MissingPolicy::kAllDeleted);
  CHECK(del.per == doctest::Approx(3.0 / 5));
  CHECK(del.wer == doctest::Approx(0.5));
  CHECK(del.word_count == 2);
}

TEST_CASE("reference with several variants is rejected") {
  const Lexicon ref = make_lexicon({{"ab", "A B"}, {"ab", "A"}});
  CHECK_THROWS_AS(evaluate_lexicon(ref, ref), Error);
}

TEST_CASE("PER and WER are invariant under duplicating the lexicon") {
  const Lexicon ref = make_lexicon({{"ab", "A B"}, {"cd", "C D E"}, {"e", "E"}});
  const Lexicon hyp = make_lexicon({{"ab", "A"}, {"cd", "C D E"}, {"e", "F G"}});
  Lexicon ref2 = ref, hyp2 = hyp;
  for (const auto& [w, v] : ref.entries()) ref2.add(w + "2", v.front());
  for (const auto& [w, v] : hyp.entries()) hyp2.add(w + "2", v.front());
  const auto a = evaluate_lexicon(hyp, ref), b = evaluate_lexicon(hyp2, ref2);
  CHECK(a.per == doctest::Approx(b.per));
  CHECK(a.wer == doctest::Approx(b.wer));
  CHECK(b.word_count == 2 * a.word_count);
}

TEST_CASE("compare_dictionaries counts better, worse and same") {
  const Lexicon ref = make_lexicon({{"a", "A"}, {"b", "B"}, {"c", "C"}});
  const Lexicon x = make_lexicon({{"a", "A"}, {"b", "X"}, {"c", "C"}});
  const Lexicon y = make_lexicon({{"a", "Y"}, {"b", "B"}, {"c", "C"}});
  const auto r = compare_dictionaries(x, y, ref);
  CHECK(r.num_words == 3);
  CHECK(r.better == 1);
  CHECK(r.worse == 1);
  CHECK(r.same == 1);
  const auto self = compare_dictionaries(x, x, ref);
  CHECK(self.same == self.num_words);
  CHECK(self.same_pct() == doctest::Approx(100.0));
  const auto one = compare_dictionaries(make_lexicon({{"a", "A"}}), make_lexicon({{"a", "Z"}}), ref);
  CHECK(one.better == 1);
  CHECK_THROWS_AS(compare_dictionaries(make_lexicon({{"q", "A"}}), x, ref), Error);
}

TEST_CASE("compare report percentages for a 26557-word comparison") {
  CompareReport r;
  r.num_words = 26557;
  r.better = 4360;
  r.worse = 2431;
  r.same = 19766;
  CHECK(r.better + r.worse + r.same == r.num_words);
  CHECK(std::round(r.better_pct() * 100) / 100 == doctest::Approx(16.42));
  CHECK(std::round(r.worse_pct() * 100) / 100 == doctest::Approx(9.15));
  CHECK(std::round(r.same_pct() * 100) / 100 == doctest::Approx(74.43));
  CHECK(std::abs(r.better_pct() + r.worse_pct() + r.same_pct() - 100.0) <= 0.01);
}

TEST_CASE("report formats use the stable field names") {
  EvalReport e;
  e.per = 0.25;
  e.word_count = 4;
  const auto j = nlohmann::json::parse(to_json(e));
  CHECK(j.at("per").get<double>() == 0.25);
  CHECK(j.contains("wer"));
  CHECK(j.contains("num_words"));
  CompareReport c;
  c.num_words = 2;
  c.same = 2;
  const auto k = nlohmann::json::parse(to_json(c));
  for (const char* f : {"num_words", "better", "worse", "same"}) CHECK(k.contains(f));
  std::ostringstream os;
  write_tsv(c, os);
  CHECK(os.str().rfind("num_words\t", 0) == 0);
}
