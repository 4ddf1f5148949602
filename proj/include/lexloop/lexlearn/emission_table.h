// include/lexloop/lexlearn/emission_table.h

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

#ifndef LEXLOOP_LEXLEARN_EMISSION_TABLE_H_
#define LEXLOOP_LEXLEARN_EMISSION_TABLE_H_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lexloop/core/symbol_table.h"

namespace lexloop::lexlearn {

/// One categorical distribution over phonemes per grapheme. Every HMM state
/// labelled with grapheme g reads row(g); there is no per-state copy, so
/// the rows are tied across states, words and sentences by construction.
class EmissionTable {
 public:
  static constexpr double kFloor = 1e-6;

  const SymbolTable& graphemes() const { return graphemes_; }
  const SymbolTable& phonemes() const { return phonemes_; }
  std::size_t num_graphemes() const { return graphemes_.size(); }
  std::size_t num_phonemes() const { return phonemes_.size(); }

  std::span<const double> row(SymbolId g) const {
    return {data_.data() + static_cast<std::size_t>(g) * num_phonemes(), num_phonemes()};
  }
  double prob(SymbolId g, SymbolId p) const { return data_[static_cast<std::size_t>(g) * num_phonemes() + p]; }
  double prob(const std::string& g, const std::string& p) const;

  /// Replaces row g. Throws unless the row has the right length, every
  /// entry is >= kFloor and the row sums to 1 within 1e-9.
  void set_row(SymbolId g, std::span<const double> row);

  /// Same as set_row, from raw expected counts: the maximum-likelihood row
  /// subject to every entry being >= kFloor. Rows with no counts are left
  /// untouched.
  void reestimate_row(SymbolId g, std::span<const double> counts);

  void save(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;
  static EmissionTable load(std::istream& in, const std::string& source = "<stream>");
  static EmissionTable load(const std::filesystem::path& path);

  bool operator==(const EmissionTable&) const = default;

 private:
  friend EmissionTable init_emissions(const std::vector<std::string>&, const std::vector<std::string>&);

  SymbolTable graphemes_;
  SymbolTable phonemes_;
  std::vector<double> data_;  // row-major, graphemes x phonemes
};

/// Uniform 1/|phonemes| rows. Inventories are sorted and de-duplicated.
/// Throws on an empty inventory.
EmissionTable init_emissions(const std::vector<std::string>& graphemes, const std::vector<std::string>& phonemes);

/// Maximizes sum_i counts[i] * log(p[i]) subject to sum p = 1 and
/// p[i] >= floor. Exposed for testing.
std::vector<double> floored_ml_distribution(std::span<const double> counts, double floor);

}  // namespace lexloop::lexlearn

#endif  // LEXLOOP_LEXLEARN_EMISSION_TABLE_H_
