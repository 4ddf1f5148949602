// include/lexloop/util/rng.h

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

#ifndef LEXLOOP_UTIL_RNG_H_
#define LEXLOOP_UTIL_RNG_H_

#include <cstddef>
#include <cstdint>

namespace lexloop {

/// Counter-based generator: the i-th draw of stream (seed, stream) is a
/// pure function of (seed, stream, i). Splitting by stream gives independent,
/// run-order-independent sequences (e.g. one stream per sentence).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform();
  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  /// Child generator keyed by this generator's key and `stream`.
  CounterRng split(std::uint64_t stream) const { return CounterRng(key_, stream); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lexloop

#endif  // LEXLOOP_UTIL_RNG_H_
