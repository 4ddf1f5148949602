// src/recognizer/noisy_channel.cc

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

#include "lexloop/recognizer/noisy_channel.h"

#include <algorithm>
#include <cmath>

#include "lexloop/core/error.h"

namespace lexloop::recognizer {

void NoiseModel::validate() const {
  for (double p : {p_sub, p_ins, p_del}) {
    if (!(p >= 0.0 && p < 1.0)) throw Error("noise rates must lie in [0,1)");
  }
  if (!(p_sub + p_del < 1.0)) throw Error("p_sub + p_del must be < 1");
  if ((p_sub > 0 || p_ins > 0) && phonemes.empty()) throw Error("noise model needs a phoneme inventory");
  for (const auto& [phone, row] : confusion) {
    if (row.size() != phonemes.size()) throw Error("confusion row for '" + phone + "' has wrong length");
    double sum = 0;
    for (double v : row) {
      if (v < 0) throw Error("negative confusion probability for '" + phone + "'");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw Error("confusion row for '" + phone + "' does not sum to 1");
  }
}

namespace {

const std::string& substitute(const NoiseModel& nm, const std::string& phone, CounterRng& rng) {
  if (auto row = nm.confusion.find(phone); row != nm.confusion.end()) {
    double u = rng.uniform();
    for (std::size_t i = 0; i < row->second.size(); ++i) {
      u -= row->second[i];
      if (u < 0) return nm.phonemes[i];
    }
    // Rounding left a sliver of mass; take the last non-zero entry.
    for (std::size_t i = row->second.size(); i-- > 0;) {
      if (row->second[i] > 0) return nm.phonemes[i];
    }
  }
  auto self = std::find(nm.phonemes.begin(), nm.phonemes.end(), phone);
  if (self == nm.phonemes.end()) return nm.phonemes[rng.below(nm.phonemes.size())];
  if (nm.phonemes.size() == 1) return phone;
  std::size_t k = rng.below(nm.phonemes.size() - 1);
  if (k >= static_cast<std::size_t>(self - nm.phonemes.begin())) ++k;
  return nm.phonemes[k];
}

}  // namespace

Pronunciation corrupt(const NoiseModel& nm, const Pronunciation& gold, CounterRng& rng) {
  Pronunciation out;
  out.reserve(gold.size() + 2);
  for (std::size_t i = 0; i <= gold.size(); ++i) {
    if (nm.p_ins > 0 && rng.uniform() < nm.p_ins) out.push_back(nm.phonemes[rng.below(nm.phonemes.size())]);
    if (i == gold.size()) break;
    const double u = rng.uniform();
    if (u < nm.p_del) continue;
    if (u < nm.p_del + nm.p_sub) {
      out.push_back(substitute(nm, gold[i], rng));
    } else {
      out.push_back(gold[i]);
    }
  }
  return out;
}

Pronunciation decode_sentence(const NoiseModel& nm, const DecodeConfig& cfg, const Pronunciation& gold,
                              CounterRng& rng) {
  if (cfg.n_candidates < 1) throw Error("n_candidates must be >= 1");
  Pronunciation best = corrupt(nm, gold, rng);
  if (cfg.n_candidates == 1) return best;
  if (cfg.lm == nullptr) throw Error("decode_sentence: no phone LM for candidate selection");
  double best_score = cfg.lm->logprob(best);
  for (int c = 1; c < cfg.n_candidates; ++c) {
    Pronunciation cand = corrupt(nm, gold, rng);
    const double score = cfg.lm->logprob(cand);
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

Corpus decode_corpus(const NoiseModel& nm, const DecodeConfig& cfg, const Corpus& gold) {
  nm.validate();
  Corpus out;
  out.language_tag = gold.language_tag;
  out.sentences.reserve(gold.sentences.size());
  const CounterRng root(nm.seed);
  for (std::size_t i = 0; i < gold.sentences.size(); ++i) {
    const auto& s = gold.sentences[i];
    if (!s.phones) throw Error("decode_corpus: sentence " + std::to_string(i + 1) + " has no gold phones");
    CounterRng rng = root.split(i);
    out.sentences.push_back({s.words, decode_sentence(nm, cfg, *s.phones, rng)});
  }
  return out;
}

}  // namespace lexloop::recognizer
