// include/lexloop/recognizer/noisy_channel.h

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

#ifndef LEXLOOP_RECOGNIZER_NOISY_CHANNEL_H_
#define LEXLOOP_RECOGNIZER_NOISY_CHANNEL_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lexloop/core/types.h"
#include "lexloop/phonelm/phone_lm.h"
#include "lexloop/util/rng.h"

namespace lexloop::recognizer {

/// Seeded substitution/insertion/deletion channel standing in for a phone
/// recognizer's acoustic errors.
struct NoiseModel {
  double p_sub = 0.08;
  double p_ins = 0.02;
  double p_del = 0.02;
  /// Inventory used for substitutions and insertions.
  std::vector<std::string> phonemes;
  /// Optional substitution rows over `phonemes`; phonemes without a row
  /// substitute uniformly to any other phoneme.
  std::map<std::string, std::vector<double>> confusion;
  std::uint64_t seed = 1;

  /// Throws lexloop::Error if the rates or confusion rows are invalid.
  void validate() const;
};

struct DecodeConfig {
  int n_candidates = 4;
  const phonelm::PhoneLm* lm = nullptr;
};

/// Per position: delete with p_del, else substitute with p_sub; per gap
/// (both ends included): insert a uniform phoneme with p_ins.
Pronunciation corrupt(const NoiseModel& nm, const Pronunciation& gold, CounterRng& rng);

/// Draws n_candidates corruptions and keeps the one the phone LM scores
/// highest (first drawn on ties).
Pronunciation decode_sentence(const NoiseModel& nm, const DecodeConfig& cfg, const Pronunciation& gold,
                              CounterRng& rng);

/// Decodes every sentence with its own stream (nm.seed, sentence index).
/// Throws if a sentence has no gold phones.
Corpus decode_corpus(const NoiseModel& nm, const DecodeConfig& cfg, const Corpus& gold);

}  // namespace lexloop::recognizer

#endif  // LEXLOOP_RECOGNIZER_NOISY_CHANNEL_H_
