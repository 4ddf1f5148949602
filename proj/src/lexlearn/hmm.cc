// src/lexlearn/hmm.cc

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

#include "lexloop/lexlearn/hmm.h"

#include <cmath>

#include "lexloop/core/error.h"
#include "lexloop/core/text.h"

namespace lexloop::lexlearn {

void Topology::validate() const {
  for (double v : {loop, advance, skip, enter_first, enter_second}) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("topology probabilities must lie in [0,1]");
  }
  if (std::abs(loop + advance + skip - 1.0) > 1e-9) throw Error("loop + advance + skip must equal 1");
  if (std::abs(enter_first + enter_second - 1.0) > 1e-9) throw Error("entry probabilities must sum to 1");
}

SentenceHmm SentenceHmm::build(const std::vector<std::string>& words, const EmissionTable& table) {
  if (words.empty()) throw Error("cannot build an HMM for an empty sentence");
  SentenceHmm hmm;
  hmm.word_begin.push_back(0);
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (const auto& g : split_utf8(words[w])) {
      auto id = table.graphemes().find(g);
      if (!id) throw Error("grapheme '" + g + "' of word '" + words[w] + "' is not in the emission table");
      hmm.state_grapheme.push_back(*id);
      hmm.state_word.push_back(static_cast<int>(w));
    }
    if (hmm.num_states() == hmm.word_begin.back()) throw Error("empty word in sentence");
    hmm.word_begin.push_back(hmm.num_states());
  }
  return hmm;
}

std::vector<SymbolId> phoneme_ids(const Pronunciation& phones, const EmissionTable& table) {
  std::vector<SymbolId> ids;
  ids.reserve(phones.size());
  for (const auto& p : phones) {
    auto id = table.phonemes().find(p);
    if (!id) throw Error("phoneme '" + p + "' is not in the emission table");
    ids.push_back(*id);
  }
  return ids;
}

}  // namespace lexloop::lexlearn
