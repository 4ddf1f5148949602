// src/lexlearn/harvest.cc

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

#include "lexloop/lexlearn/harvest.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lexloop/core/error.h"
#include "lexloop/core/io.h"
#include "lexloop/core/text.h"

namespace lexloop::lexlearn {

HarvestResult harvest(const Corpus& decoded, const std::vector<std::optional<Alignment>>& alignments) {
  if (alignments.size() != decoded.sentences.size()) {
    throw Error("harvest: " + std::to_string(alignments.size()) + " alignments for " +
                std::to_string(decoded.sentences.size()) + " sentences");
  }
  HarvestResult result;
  for (std::size_t i = 0; i < alignments.size(); ++i) {
    if (!alignments[i]) continue;
    const Sentence& s = decoded.sentences[i];
    const auto& spans = alignments[i]->spans;
    if (spans.size() != s.words.size() || !s.phones) throw Error("harvest: alignment does not match sentence " + std::to_string(i + 1));
    for (std::size_t w = 0; w < spans.size(); ++w) {
      if (spans[w].empty()) {
        ++result.empty_spans;
        continue;
      }
      Pronunciation pron(s.phones->begin() + static_cast<std::ptrdiff_t>(spans[w].begin),
                         s.phones->begin() + static_cast<std::ptrdiff_t>(spans[w].end));
      ++result.counts[s.words[w]][pron];
    }
  }
  return result;
}

Lexicon accept_threshold(const HarvestCounts& counts, int k, const phonelm::PhoneLm* lm) {
  if (k < 1) throw Error("acceptance threshold k must be >= 1");
  Lexicon lex;
  for (const auto& [word, prons] : counts) {
    const Pronunciation* best = nullptr;
    std::int64_t best_count = 0;
    double best_score = 0;
    // Map order is byte order, so a strict comparison keeps the smaller one.
    for (const auto& [pron, n] : prons) {
      double score = lm ? lm->logprob(pron) : 0.0;
      if (n > best_count || (n == best_count && lm && score > best_score)) {
        best = &pron;
        best_count = n;
        best_score = score;
      }
    }
    if (best && best_count >= k) lex.set(word, {*best, Provenance::kLearned, best_count});
  }
  return lex;
}

Lexicon pool_with_seed(const Lexicon& learned, const Lexicon& seed) {
  Lexicon pooled = seed;
  for (const auto& [word, variants] : learned.entries()) {
    if (seed.contains(word)) continue;
    for (const auto& e : variants) pooled.add(word, e);
  }
  return pooled;
}

void write_harvest(const HarvestCounts& counts, std::ostream& out) {
  for (const auto& [word, prons] : counts) {
    for (const auto& [pron, n] : prons) out << word << '\t' << join(pron) << '\t' << n << '\n';
  }
}

void write_harvest(const HarvestCounts& counts, const std::filesystem::path& path) {
  std::ostringstream os;
  write_harvest(counts, os);
  write_file_atomic(path, os.str());
}

HarvestCounts read_harvest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  HarvestCounts counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    bool ok = true;
    auto fields = split_fields(line, '\t', &ok);
    if (!ok || fields.size() != 3) throw ParseError(path.string(), lineno, "expected word<TAB>pron<TAB>count");
    bool pok = true;
    Pronunciation pron = split_fields(fields[1], ' ', &pok);
    std::int64_t n = 0;
    auto [ptr, ec] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), n);
    if (!pok || ec != std::errc() || ptr != fields[2].data() + fields[2].size() || n < 1) {
      throw ParseError(path.string(), lineno, "bad pronunciation or count");
    }
    counts[fields[0]][pron] = n;
  }
  return counts;
}

}  // namespace lexloop::lexlearn
