// tests/recognizer_test.cc

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

#include "doctest.h"
#include "lexloop/core/error.h"
#include "lexloop/eval/metrics.h"
#include "lexloop/phonelm/phone_lm.h"
#include "lexloop/recognizer/noisy_channel.h"
#include "lexloop/synthlang/synth.h"
#include "test_util.h"

using namespace lexloop;
using namespace lexloop::recognizer;
using lexloop::testing::P;

namespace {

NoiseModel model(double sub, double ins, double del) {
  NoiseModel nm;
  nm.p_sub = sub;
  nm.p_ins = ins;
  nm.p_del = del;
  nm.phonemes = {"A", "B", "C", "D"};
  return nm;
}

Pronunciation random_seq(CounterRng& rng, std::size_t n) {
  static const std::vector<std::string> v = {"A", "B", "C", "D"};
  Pronunciation p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(v[rng.below(4)]);
  return p;
}

}  // namespace

TEST_CASE("zero rates are the identity channel") {
  CounterRng rng(1), src(2);
  const auto gold = random_seq(src, 50);
  CHECK(corrupt(model(0, 0, 0), gold, rng) == gold);
}

TEST_CASE("certain deletion empties the sequence") {
  CounterRng rng(1), src(2);
  CHECK(corrupt(model(0, 0, 1 - 1e-12), random_seq(src, 40), rng).empty());
}

TEST_CASE("substitution rate is reproduced") {
  CounterRng rng(7), src(8);
  const auto gold = random_seq(src, 10000);
  const auto out = corrupt(model(0.1, 0, 0), gold, rng);
  REQUIRE(out.size() == gold.size());
  std::size_t changed = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) changed += out[i] != gold[i];
  CHECK(static_cast<double>(changed) / gold.size() == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("insertion and deletion rates are reproduced") {
  CounterRng rng(11), src(12);
  const auto gold = random_seq(src, 20000);
  CHECK(static_cast<double>(corrupt(model(0, 0.05, 0), gold, rng).size()) / gold.size() ==
        doctest::Approx(1.05).epsilon(0.01));
  CHECK(static_cast<double>(corrupt(model(0, 0, 0.05), gold, rng).size()) / gold.size() ==
        doctest::Approx(0.95).epsilon(0.01));
}

TEST_CASE("confusion rows drive substitutions") {
  NoiseModel nm = model(0.5, 0, 0);
  nm.confusion["A"] = {0, 1, 0, 0};
  CounterRng rng(3);
  const auto out = corrupt(nm, Pronunciation(500, "A"), rng);
  for (const auto& p : out) CHECK((p == "A" || p == "B"));
  nm.confusion["A"] = {0, 0.5, 0, 0};
  CHECK_THROWS_AS(nm.validate(), Error);
  CHECK_THROWS_AS(model(0.6, 0, 0.5).validate(), Error);
}

TEST_CASE("decode with one candidate equals corrupt on the same stream") {
  const auto nm = model(0.2, 0.1, 0.1);
  const auto lm = phonelm::train_lm({P("A B C D")}, 2);
  CounterRng src(4);
  for (int i = 0; i < 20; ++i) {
    const auto gold = random_seq(src, 12);
    CounterRng r1(9, i), r2(9, i);
    CHECK(decode_sentence(nm, {1, &lm}, gold, r1) == corrupt(nm, gold, r2));
  }
  CounterRng r(5);
  const auto gold = random_seq(src, 12);
  CHECK(decode_sentence(model(0, 0, 0), {8, &lm}, gold, r) == gold);
}

TEST_CASE("LM selection lowers the error against gold") {
  synthlang::SynthSpec spec;
  spec.vocab_size = 300;
  spec.n_sentences = 1500;
  spec.n_test_words = 20;
  spec.seed = 4;
  const auto lang = synthlang::generate_language(spec);
  std::vector<Pronunciation> gold;
  for (const auto& s : lang.corpus.sentences) gold.push_back(*s.phones);
  const auto lm = phonelm::train_lm(gold, 5);
  NoiseModel nm = model(0.2, 0.05, 0.05);
  nm.phonemes = lang.rules.phonemes();
  std::size_t edits1 = 0, edits16 = 0;
  for (std::size_t i = 0; i < 200; ++i) {
    CounterRng a(31, i), b(31, i);
    edits1 += eval::edit_distance(decode_sentence(nm, {1, &lm}, gold[i], a), gold[i]);
    edits16 += eval::edit_distance(decode_sentence(nm, {16, &lm}, gold[i], b), gold[i]);
  }
  CHECK(edits16 < edits1);
}

TEST_CASE("decode_corpus contract") {
  const auto lm = phonelm::train_lm({P("A B")}, 2);
  const auto nm = model(0.1, 0.1, 0.1);
  Corpus empty;
  empty.language_tag = "xx";
  CHECK(decode_corpus(nm, {4, &lm}, empty).sentences.empty());

  Corpus c;
  c.language_tag = "xx";
  CounterRng src(6);
  for (int i = 0; i < 30; ++i) c.sentences.push_back({{"w"}, random_seq(src, 8)});
  const auto d1 = decode_corpus(nm, {4, &lm}, c), d2 = decode_corpus(nm, {4, &lm}, c);
  CHECK(d1 == d2);
  CHECK(d1.sentences.size() == c.sentences.size());
  CHECK(decode_corpus(model(0, 0, 0), {4, &lm}, c) == c);

  c.sentences.push_back({{"w"}, std::nullopt});
  CHECK_THROWS_AS(decode_corpus(nm, {4, &lm}, c), Error);
}
