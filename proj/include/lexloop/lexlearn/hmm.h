// include/lexloop/lexlearn/hmm.h

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

#ifndef LEXLOOP_LEXLEARN_HMM_H_
#define LEXLOOP_LEXLEARN_HMM_H_

#include <string>
#include <vector>

#include "lexloop/core/symbol_table.h"
#include "lexloop/core/types.h"
#include "lexloop/lexlearn/emission_table.h"

namespace lexloop::lexlearn {

/// Globally tied word-HMM transition parameters.
///
/// A word of L graphemes has states 0..L-1. Each emitting state moves by
/// +0 (loop), +1 (advance) or +2 (skip); any target >= L is the word exit.
/// A word is entered at state 0 (enter_first) or state 1 (enter_second);
/// for a one-state word, enter_second passes straight to the exit and the
/// word emits nothing.
struct Topology {
  double loop = 0.10;
  double advance = 0.80;
  double skip = 0.10;
  double enter_first = 0.9;
  double enter_second = 0.1;

  /// Throws lexloop::Error unless both distributions are valid.
  void validate() const;
  bool operator==(const Topology&) const = default;
};

/// Word HMMs of a sentence laid end to end. The exit of word w feeds the
/// entry of word w + 1.
struct SentenceHmm {
  std::vector<SymbolId> state_grapheme;
  std::vector<int> state_word;
  std::vector<int> word_begin;  // num_words() + 1 offsets into the states

  int num_states() const { return static_cast<int>(state_grapheme.size()); }
  int num_words() const { return static_cast<int>(word_begin.size()) - 1; }
  int word_length(int w) const { return word_begin[w + 1] - word_begin[w]; }

  /// Throws lexloop::Error on an empty sentence or a grapheme missing from
  /// the table.
  static SentenceHmm build(const std::vector<std::string>& words, const EmissionTable& table);
};

/// Maps phonemes to table ids; throws on a phoneme outside the inventory.
std::vector<SymbolId> phoneme_ids(const Pronunciation& phones, const EmissionTable& table);

}  // namespace lexloop::lexlearn

#endif  // LEXLOOP_LEXLEARN_HMM_H_
