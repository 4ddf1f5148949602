// include/lexloop/g2p/g2p_model.h

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

#ifndef LEXLOOP_G2P_G2P_MODEL_H_
#define LEXLOOP_G2P_G2P_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexloop/core/symbol_table.h"
#include "lexloop/core/types.h"
#include "lexloop/util/witten_bell.h"

namespace lexloop::g2p {

/// One training pair. The language tag is prepended to the grapheme string
/// as a pseudo-grapheme that emits nothing.
struct TaggedEntry {
  std::string language_tag;
  Word word;
  Pronunciation pron;
  double weight = 1.0;
};

/// A grapheme chunk paired with a phoneme chunk. Legal shapes are
/// (1,0), (1,1), (1,2) and (2,1).
struct Graphone {
  std::vector<std::string> graphemes;
  std::vector<std::string> phonemes;

  bool operator==(const Graphone&) const = default;
};

struct TrainOptions {
  int order = 3;
  int em_iters = 10;
  std::uint64_t seed = 1;
};

/// Joint-sequence G2P: graphone inventory from EM chunk alignment plus a
/// Witten-Bell graphone n-gram. Immutable once trained.
class G2pModel {
 public:
  static constexpr int kExhaustive = std::numeric_limits<int>::max();

  /// Phonemes of the best graphone segmentation of `word` under `tag`.
  /// Ties go to the lexicographically smallest graphone-id sequence.
  /// Throws OovError for a grapheme the model never saw and lexloop::Error
  /// when no segmentation exists.
  Pronunciation predict(std::string_view tag, const Word& word, int beam = 8) const;

  /// log P(graphones, end | tag) under the n-gram. Ids index graphones().
  double log_prob(std::string_view tag, std::span<const int> graphone_ids) const;

  /// Conditional distribution support for tests: P(event | history) where
  /// events are graphone ids plus end_event().
  double ngram_prob(std::span<const std::int32_t> history, std::int32_t event) const {
    return ngram_.prob(history, event);
  }
  std::vector<std::vector<std::int32_t>> ngram_contexts() const { return ngram_.contexts(); }
  std::int32_t end_event() const { return static_cast<std::int32_t>(graphones_.size()); }
  std::int32_t begin_symbol() const { return end_event() + 1; }

  std::vector<Graphone> graphones() const;
  /// Graphone ids whose grapheme chunk equals `graphemes`; empty if none.
  std::vector<int> graphones_for(std::span<const std::string> graphemes) const;
  const std::vector<double>& chunk_probs() const { return chunk_probs_; }
  const std::vector<double>& em_log_likelihood() const { return em_trace_; }
  const std::vector<std::string>& languages() const { return tags_; }
  int order() const { return ngram_.order(); }
  double lambda() const { return lambda_; }
  bool knows_grapheme(std::string_view g) const { return graphemes_.find(g).has_value(); }

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static G2pModel load(std::istream& in, const std::string& source = "<stream>");
  static G2pModel load(const std::filesystem::path& path);

  bool operator==(const G2pModel&) const = default;

 private:
  struct Chunk {
    std::vector<SymbolId> graphemes;
    std::vector<SymbolId> phonemes;
    auto operator<=>(const Chunk&) const = default;
  };

  friend G2pModel train_g2p(const std::vector<TaggedEntry>&, const TrainOptions&);
  friend G2pModel fine_tune(const std::vector<TaggedEntry>&, const std::vector<TaggedEntry>&, double,
                            const TrainOptions&);

  std::vector<std::int32_t> initial_history(std::string_view tag) const;
  int tag_index(std::string_view tag) const;
  bool allowed(int tag, int graphone) const;
  Pronunciation search(const std::vector<SymbolId>& graphemes, int tag, bool filter, int beam, bool* found) const;
  void index_chunks();

  SymbolTable graphemes_;
  SymbolTable phonemes_;
  std::vector<Chunk> graphones_;
  std::vector<double> chunk_probs_;
  std::vector<std::string> tags_;
  std::vector<std::vector<bool>> tag_phonemes_;
  std::vector<double> em_trace_;
  double lambda_ = 1.0;
  WittenBellNgram ngram_;

  // Derived lookup: grapheme chunk -> candidate graphone ids (ascending).
  std::vector<std::pair<std::vector<SymbolId>, std::vector<int>>> by_chunk_;
};

/// Trains on `data`. Throws on empty data, empty pronunciations, order
/// outside [1,5], or entries with more than two phonemes per grapheme (the
/// message lists every offending word).
G2pModel train_g2p(const std::vector<TaggedEntry>& data, const TrainOptions& options = {});

/// Training on `model_data` plus `target` with every target weight
/// multiplied by `lambda`. lambda == 1 is plain pooling.
G2pModel fine_tune(const std::vector<TaggedEntry>& model_data, const std::vector<TaggedEntry>& target,
                   double lambda, const TrainOptions& options = {});

struct ApplyResult {
  Lexicon lexicon;
  /// Words that could not be converted, with the reason.
  std::vector<std::pair<std::string, std::string>> skipped;
};

ApplyResult apply_g2p(const G2pModel& model, std::string_view tag, const std::vector<Word>& vocabulary,
                      int beam = 8);

/// Tags every lexicon variant with `tag` at unit weight.
std::vector<TaggedEntry> tagged_entries(const Lexicon& lex, const std::string& tag, double weight = 1.0);

}  // namespace lexloop::g2p

#endif  // LEXLOOP_G2P_G2P_MODEL_H_
