// include/lexloop/core/symbol_table.h

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

#ifndef LEXLOOP_CORE_SYMBOL_TABLE_H_
#define LEXLOOP_CORE_SYMBOL_TABLE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexloop {

using SymbolId = std::int32_t;

/// Bijective string <-> dense id map. Ids are assigned in insertion order.
class SymbolTable {
 public:
  /// Returns the id of `text`, adding it if unseen. Throws on empty text or
  /// text containing whitespace.
  SymbolId intern(std::string_view text);

  std::optional<SymbolId> find(std::string_view text) const;
  const std::string& text(SymbolId id) const { return texts_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return texts_.size(); }
  const std::vector<std::string>& texts() const { return texts_; }

  bool operator==(const SymbolTable& other) const { return texts_ == other.texts_; }

 private:
  std::vector<std::string> texts_;
  std::unordered_map<std::string, SymbolId> ids_;
};

/// True if `text` is a legal symbol: non-empty, no ASCII whitespace.
bool is_valid_symbol(std::string_view text);

}  // namespace lexloop

#endif  // LEXLOOP_CORE_SYMBOL_TABLE_H_
