// include/lexloop/util/witten_bell.h

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

#ifndef LEXLOOP_UTIL_WITTEN_BELL_H_
#define LEXLOOP_UTIL_WITTEN_BELL_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexloop {

/// Interpolated Witten-Bell n-gram over dense integer events.
///
///   P(w | h) = (c(h, w) + T(h) * P(w | h')) / (c(h) + T(h))
///
/// where h' drops the oldest id of h, T(h) is the number of distinct events
/// seen after h, and the recursion bottoms out in the uniform distribution
/// over all `num_events` events. Histories never seen in training fall
/// through to the longest seen suffix. Counts may be fractional (weighted).
///
/// History ids live in [0, num_symbols), which may exceed the event range
/// so that begin-of-sequence and tag markers can condition without ever
/// being predicted.
class WittenBellNgram {
 public:
  WittenBellNgram() = default;
  WittenBellNgram(int order, int num_events, int num_symbols);

  /// Counts `event` after every suffix (lengths 0..order-1) of `history`.
  /// `history` is oldest-first.
  void add(std::span<const std::int32_t> history, std::int32_t event, double weight = 1.0);

  double prob(std::span<const std::int32_t> history, std::int32_t event) const;

  /// Relative frequency c(h, w) / c(h) using the last order-1 ids of
  /// `history`; 0 when h was never seen.
  double ml_prob(std::span<const std::int32_t> history, std::int32_t event) const;

  int order() const { return order_; }
  int num_events() const { return num_events_; }
  int num_symbols() const { return num_symbols_; }
  std::size_t num_contexts() const { return nodes_.size(); }

  /// Seen contexts, oldest-first, sorted by (length, ids).
  std::vector<std::vector<std::int32_t>> contexts() const;

  void write(std::ostream& out) const;
  static WittenBellNgram read(std::istream& in, const std::string& source);

  bool operator==(const WittenBellNgram& other) const;

 private:
  struct Node {
    double total = 0.0;
    std::unordered_map<std::int32_t, double> next;
  };

  std::uint64_t key(std::span<const std::int32_t> history, std::size_t n) const;
  std::vector<std::int32_t> unpack(std::uint64_t key) const;

  int order_ = 1;
  int num_events_ = 0;
  int num_symbols_ = 0;
  int bits_ = 1;
  std::unordered_map<std::uint64_t, Node> nodes_;
};

}  // namespace lexloop

#endif  // LEXLOOP_UTIL_WITTEN_BELL_H_
