// include/lexloop/lexlearn/harvest.h

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

#ifndef LEXLOOP_LEXLEARN_HARVEST_H_
#define LEXLOOP_LEXLEARN_HARVEST_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lexloop/core/types.h"
#include "lexloop/lexlearn/viterbi.h"
#include "lexloop/phonelm/phone_lm.h"

namespace lexloop::lexlearn {

/// word -> decoded pronunciation -> number of occurrences.
using HarvestCounts = std::map<std::string, std::map<Pronunciation, std::int64_t, PronunciationLess>>;

struct HarvestResult {
  HarvestCounts counts;
  std::size_t empty_spans = 0;
};

/// Counts the phonemes each word received. Empty spans are tallied in
/// `empty_spans` but never counted as pronunciations. Sentences whose
/// alignment is nullopt are ignored.
HarvestResult harvest(const Corpus& decoded, const std::vector<std::optional<Alignment>>& alignments);

/// Keeps, per word, its modal pronunciation if that was decoded at least k
/// times. Ties on the count go to the higher phone-LM score when `lm` is
/// given, otherwise to the byte-wise smaller pronunciation.
Lexicon accept_threshold(const HarvestCounts& counts, int k, const phonelm::PhoneLm* lm = nullptr);

/// Union of both lexicons; a word present in `seed` keeps only its seed
/// pronunciations.
Lexicon pool_with_seed(const Lexicon& learned, const Lexicon& seed);

/// TSV `word<TAB>pron<TAB>count`, sorted.
void write_harvest(const HarvestCounts& counts, std::ostream& out);
void write_harvest(const HarvestCounts& counts, const std::filesystem::path& path);
HarvestCounts read_harvest(const std::filesystem::path& path);

}  // namespace lexloop::lexlearn

#endif  // LEXLOOP_LEXLEARN_HARVEST_H_
