// include/lexloop/phonelm/phone_lm.h

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

#ifndef LEXLOOP_PHONELM_PHONE_LM_H_
#define LEXLOOP_PHONELM_PHONE_LM_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexloop/core/symbol_table.h"
#include "lexloop/core/types.h"
#include "lexloop/util/witten_bell.h"

namespace lexloop::phonelm {

/// Witten-Bell phone n-gram with sentence-boundary markers and a single
/// unknown-phoneme event. Events are the training phonemes, end-of-sentence
/// and <unk>; begin-of-sentence only appears in histories.
class PhoneLm {
 public:
  /// log P(seq, end | begin). Unseen phonemes score as <unk>.
  double logprob(const Pronunciation& seq) const;

  /// P(next | history) with symbolic events; `next` may be kEnd or kUnk.
  double prob(const std::vector<std::string>& history, const std::string& next) const;

  int order() const { return ngram_.order(); }
  const SymbolTable& vocabulary() const { return phones_; }
  std::size_t num_events() const { return phones_.size() + 2; }

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static PhoneLm load(std::istream& in, const std::string& source = "<stream>");
  static PhoneLm load(const std::filesystem::path& path);

  bool operator==(const PhoneLm&) const = default;

  static constexpr const char* kBegin = "<s>";
  static constexpr const char* kEnd = "</s>";
  static constexpr const char* kUnk = "<unk>";

 private:
  friend PhoneLm train_lm(const std::vector<Pronunciation>&, int);

  std::int32_t event_id(const std::string& phone) const;
  std::int32_t end_id() const { return static_cast<std::int32_t>(phones_.size()); }
  std::int32_t unk_id() const { return end_id() + 1; }
  std::int32_t begin_id() const { return end_id() + 2; }

  SymbolTable phones_;
  WittenBellNgram ngram_;
};

/// Trains on `sequences` (order in [1,7]). The vocabulary is sorted, so the
/// model does not depend on the order of `sequences`.
PhoneLm train_lm(const std::vector<Pronunciation>& sequences, int order = 5);

/// exp(-mean log-probability per token), counting one end token per sequence.
double perplexity(const PhoneLm& lm, const std::vector<Pronunciation>& sequences);

}  // namespace lexloop::phonelm

#endif  // LEXLOOP_PHONELM_PHONE_LM_H_
