// src/eval/metrics.cc

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

#include "lexloop/eval/metrics.h"

#include <algorithm>
#include <ostream>
#include <vector>

#include <fmt/format.h>
#include "json.hpp"

#include "lexloop/core/error.h"

namespace lexloop::eval {
namespace {

const Pronunciation& single_reference(const std::string& word, const std::vector<LexiconEntry>& variants) {
  if (variants.size() != 1) {
    throw Error("reference word '" + word + "' has " + std::to_string(variants.size()) + " pronunciations");
  }
  return variants.front().pron;
}

}  // namespace

std::size_t edit_distance(const Pronunciation& a, const Pronunciation& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

EvalReport evaluate_lexicon(const Lexicon& hyp, const Lexicon& ref, MissingPolicy policy) {
  EvalReport r;
  std::size_t wrong = 0;
  for (const auto& [word, variants] : ref.entries()) {
    const Pronunciation& gold = single_reference(word, variants);
    const auto* h = hyp.find(word);
    std::size_t d = 0;
    if (!h || h->empty()) {
      ++r.skipped;
      if (policy == MissingPolicy::kSkip) continue;
      d = gold.size();
    } else {
      d = edit_distance(h->front().pron, gold);
    }
    ++r.word_count;
    r.total_ref_phones += gold.size();
    r.total_edits += d;
    if (d > 0) ++wrong;
  }
  if (r.total_ref_phones > 0) r.per = static_cast<double>(r.total_edits) / static_cast<double>(r.total_ref_phones);
  if (r.word_count > 0) r.wer = static_cast<double>(wrong) / static_cast<double>(r.word_count);
  return r;
}

CompareReport compare_dictionaries(const Lexicon& a, const Lexicon& b, const Lexicon& ref) {
  CompareReport r;
  for (const auto& [word, variants] : ref.entries()) {
    const auto* ha = a.find(word);
    const auto* hb = b.find(word);
    if (!ha || !hb || ha->empty() || hb->empty()) continue;
    const Pronunciation& gold = single_reference(word, variants);
    const std::size_t da = edit_distance(ha->front().pron, gold);
    const std::size_t db = edit_distance(hb->front().pron, gold);
    ++r.num_words;
    if (da < db) {
      ++r.better;
    } else if (da > db) {
      ++r.worse;
    } else {
      ++r.same;
    }
  }
  if (r.num_words == 0) throw Error("compare_dictionaries: no word is shared by all three lexicons");
  return r;
}

void write_tsv(const EvalReport& r, std::ostream& out) {
  out << "num_words\tper\twer\ttotal_ref_phones\ttotal_edits\tskipped\n";
  out << fmt::format("{}\t{:.6f}\t{:.6f}\t{}\t{}\t{}\n", r.word_count, r.per, r.wer, r.total_ref_phones,
                     r.total_edits, r.skipped);
}

void write_tsv(const CompareReport& r, std::ostream& out) {
  out << "num_words\tbetter\tbetter_pct\tworse\tworse_pct\tsame\tsame_pct\n";
  out << fmt::format("{}\t{}\t{:.2f}\t{}\t{:.2f}\t{}\t{:.2f}\n", r.num_words, r.better, r.better_pct(), r.worse,
                     r.worse_pct(), r.same, r.same_pct());
}

void print_table(const EvalReport& r, std::ostream& out) {
  out << fmt::format("{:>10}  {:>8}  {:>8}  {:>8}\n", "Num Words", "PER", "WER", "Skipped");
  out << fmt::format("{:>10}  {:>7.2f}%  {:>7.2f}%  {:>8}\n", r.word_count, 100 * r.per, 100 * r.wer, r.skipped);
}

void print_table(const CompareReport& r, std::ostream& out) {
  out << fmt::format("{:>10}  {:>16}  {:>16}  {:>16}\n", "Num Words", "Better", "Worse", "Same");
  const auto cell = [](std::size_t n, double pct) { return fmt::format("{} ({:.2f}%)", n, pct); };
  out << fmt::format("{:>10}  {:>16}  {:>16}  {:>16}\n", r.num_words, cell(r.better, r.better_pct()),
                     cell(r.worse, r.worse_pct()), cell(r.same, r.same_pct()));
}

std::string to_json(const EvalReport& r) {
  nlohmann::json j = {{"per", r.per},
                      {"wer", r.wer},
                      {"num_words", r.word_count},
                      {"total_ref_phones", r.total_ref_phones},
                      {"total_edits", r.total_edits},
                      {"skipped", r.skipped}};
  return j.dump(2);
}

std::string to_json(const CompareReport& r) {
  nlohmann::json j = {{"num_words", r.num_words}, {"better", r.better}, {"worse", r.worse}, {"same", r.same}};
  return j.dump(2);
}

}  // namespace lexloop::eval
