// include/lexloop/lexlearn/viterbi.h

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

#ifndef LEXLOOP_LEXLEARN_VITERBI_H_
#define LEXLOOP_LEXLEARN_VITERBI_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lexloop/core/types.h"
#include "lexloop/lexlearn/emission_table.h"
#include "lexloop/lexlearn/hmm.h"

namespace lexloop::lexlearn {

/// Phonemes [begin, end) of the decoded sequence assigned to one word.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool empty() const { return begin == end; }
  bool operator==(const WordSpan&) const = default;
};

struct Alignment {
  std::vector<WordSpan> spans;  // one per word, in order
  std::vector<int> states;      // sentence state that emitted each phoneme
  double log_score = 0.0;
};

/// Most likely state path through the concatenated word HMMs.
/// Ties prefer advance over self-loop over skip, then the lower state index.
/// Throws AlignmentError when no path exists.
Alignment viterbi_align(const std::vector<std::string>& words, const Pronunciation& phones,
                        const EmissionTable& table, const Topology& topology);

struct CorpusAlignment {
  std::vector<std::optional<Alignment>> sentences;  // nullopt = unalignable
  std::size_t failed = 0;
};

CorpusAlignment align_corpus(const Corpus& decoded, const EmissionTable& table, const Topology& topology);

}  // namespace lexloop::lexlearn

#endif  // LEXLOOP_LEXLEARN_VITERBI_H_
