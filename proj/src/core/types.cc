// src/core/types.cc

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

#include "lexloop/core/types.h"

#include <algorithm>

#include "lexloop/core/error.h"
#include "lexloop/core/text.h"

namespace lexloop {

bool PronunciationLess::operator()(const Pronunciation& a, const Pronunciation& b) const {
  return join(a) < join(b);
}

Word Word::from_surface(std::string_view surface) {
  Word w;
  w.surface = std::string(surface);
  w.graphemes = split_utf8(surface);
  if (w.graphemes.empty()) throw Error("empty word");
  return w;
}

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kSeed: return "seed";
    case Provenance::kG2p: return "g2p";
    case Provenance::kLearned: return "learned";
  }
  return "seed";
}

std::optional<Provenance> provenance_from_string(std::string_view s) {
  if (s == "seed") return Provenance::kSeed;
  if (s == "g2p") return Provenance::kG2p;
  if (s == "learned") return Provenance::kLearned;
  return std::nullopt;
}

bool Lexicon::add(const std::string& word, LexiconEntry entry) {
  auto& variants = entries_[word];
  const std::string key = join(entry.pron);
  auto pos = std::lower_bound(variants.begin(), variants.end(), key,
                              [](const LexiconEntry& e, const std::string& k) { return join(e.pron) < k; });
  if (pos != variants.end() && join(pos->pron) == key) return false;
  variants.insert(pos, std::move(entry));
  return true;
}

void Lexicon::set(const std::string& word, LexiconEntry entry) {
  entries_[word] = {std::move(entry)};
}

const std::vector<LexiconEntry>* Lexicon::find(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

std::size_t Lexicon::num_entries() const {
  std::size_t n = 0;
  for (const auto& [word, variants] : entries_) n += variants.size();
  return n;
}

std::vector<std::string> Lexicon::words() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [word, variants] : entries_) out.push_back(word);
  return out;
}

std::vector<std::string> Corpus::vocabulary() const {
  std::vector<std::string> out;
  for (const auto& [word, count] : word_counts()) out.push_back(word);
  return out;
}

std::map<std::string, std::int64_t> Corpus::word_counts() const {
  std::map<std::string, std::int64_t> counts;
  for (const auto& s : sentences) {
    for (const auto& w : s.words) ++counts[w];
  }
  return counts;
}

}  // namespace lexloop
