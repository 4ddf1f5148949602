// include/lexloop/eval/metrics.h

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

#ifndef LEXLOOP_EVAL_METRICS_H_
#define LEXLOOP_EVAL_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <string>

#include "lexloop/core/types.h"

namespace lexloop::eval {

/// Levenshtein distance with unit costs.
std::size_t edit_distance(const Pronunciation& a, const Pronunciation& b);

enum class MissingPolicy {
  kSkip,        // words missing from the hypothesis are left out
  kAllDeleted,  // a missing word costs its full reference length
};

struct EvalReport {
  double per = 0.0;  // total_edits / total_ref_phones
  double wer = 0.0;  // fraction of scored words with any error
  std::size_t word_count = 0;
  std::size_t total_ref_phones = 0;
  std::size_t total_edits = 0;
  std::size_t skipped = 0;  // reference words absent from the hypothesis
};

/// Scores `hyp` against `ref` word by word. Hypothesis words carrying more
/// than one variant are scored on their first variant. Throws if a reference
/// word has several pronunciations.
EvalReport evaluate_lexicon(const Lexicon& hyp, const Lexicon& ref, MissingPolicy policy = MissingPolicy::kSkip);

struct CompareReport {
  std::size_t num_words = 0;
  std::size_t better = 0;
  std::size_t worse = 0;
  std::size_t same = 0;

  double better_pct() const { return pct(better); }
  double worse_pct() const { return pct(worse); }
  double same_pct() const { return pct(same); }

 private:
  double pct(std::size_t n) const { return num_words ? 100.0 * static_cast<double>(n) / num_words : 0.0; }
};

/// Per word in all three lexicons: `a` is better when it is closer to `ref`
/// than `b`. Throws when the three share no word.
CompareReport compare_dictionaries(const Lexicon& a, const Lexicon& b, const Lexicon& ref);

void write_tsv(const EvalReport& r, std::ostream& out);
void write_tsv(const CompareReport& r, std::ostream& out);
void print_table(const EvalReport& r, std::ostream& out);
void print_table(const CompareReport& r, std::ostream& out);
std::string to_json(const EvalReport& r);
std::string to_json(const CompareReport& r);

}  // namespace lexloop::eval

#endif  // LEXLOOP_EVAL_METRICS_H_
