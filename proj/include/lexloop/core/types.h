// include/lexloop/core/types.h

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

#ifndef LEXLOOP_CORE_TYPES_H_
#define LEXLOOP_CORE_TYPES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lexloop {

/// A pronunciation is a sequence of opaque phoneme symbols.
using Pronunciation = std::vector<std::string>;

/// Orders pronunciations by the bytes of their space-joined form, which is
/// the order they take in a serialized lexicon.
struct PronunciationLess {
  bool operator()(const Pronunciation& a, const Pronunciation& b) const;
};

struct Word {
  std::string surface;
  std::vector<std::string> graphemes;

  /// One grapheme per Unicode scalar of `surface`.
  static Word from_surface(std::string_view surface);

  bool operator==(const Word&) const = default;
};

enum class Provenance { kSeed, kG2p, kLearned };

std::string_view to_string(Provenance p);
std::optional<Provenance> provenance_from_string(std::string_view s);

struct LexiconEntry {
  Pronunciation pron;
  Provenance provenance = Provenance::kSeed;
  std::int64_t count = 0;

  bool operator==(const LexiconEntry&) const = default;
};

/// Word -> pronunciation variants. Words iterate in byte order and the
/// variants of a word are kept sorted with PronunciationLess, so two lexicons
/// holding the same entries are equal and serialize identically.
class Lexicon {
 public:
  using Map = std::map<std::string, std::vector<LexiconEntry>>;

  /// Adds a variant. Returns false (and changes nothing) if the
  /// (word, pronunciation) pair is already present.
  bool add(const std::string& word, LexiconEntry entry);

  /// Replaces all variants of `word` with a single entry.
  void set(const std::string& word, LexiconEntry entry);

  bool erase(const std::string& word) { return entries_.erase(word) > 0; }

  const std::vector<LexiconEntry>* find(const std::string& word) const;
  bool contains(const std::string& word) const { return entries_.count(word) > 0; }

  std::size_t num_words() const { return entries_.size(); }
  std::size_t num_entries() const;
  bool empty() const { return entries_.empty(); }

  const Map& entries() const { return entries_; }
  std::vector<std::string> words() const;

  bool operator==(const Lexicon&) const = default;

 private:
  Map entries_;
};

struct Sentence {
  std::vector<std::string> words;
  std::optional<Pronunciation> phones;

  bool operator==(const Sentence&) const = default;
};

struct Corpus {
  std::string language_tag;
  std::vector<Sentence> sentences;

  /// Distinct words in byte order.
  std::vector<std::string> vocabulary() const;
  std::map<std::string, std::int64_t> word_counts() const;

  bool operator==(const Corpus&) const = default;
};

}  // namespace lexloop

#endif  // LEXLOOP_CORE_TYPES_H_
