// include/lexloop/lexlearn/baum_welch.h

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

#ifndef LEXLOOP_LEXLEARN_BAUM_WELCH_H_
#define LEXLOOP_LEXLEARN_BAUM_WELCH_H_

#include <cstddef>
#include <vector>

#include "lexloop/core/types.h"
#include "lexloop/lexlearn/emission_table.h"
#include "lexloop/lexlearn/hmm.h"

namespace lexloop::lexlearn {

struct EmOptions {
  int max_iters = 30;
  double tol = 1e-4;
  /// Re-estimate the (loop, advance, skip) triple along with emissions.
  bool update_transitions = true;
};

struct EmResult {
  EmissionTable table;
  Topology topology;
  /// Total log-likelihood of the aligned sentences under the parameters at
  /// the start of each iteration.
  std::vector<double> log_likelihood;
  /// Indices of sentences no path can emit; excluded from training.
  std::vector<std::size_t> skipped;
};

/// Tied Baum-Welch. Emission counts are pooled per grapheme over every state
/// carrying it, then re-estimated with the probability floor; the transition
/// triple is pooled over all states. Stops when the log-likelihood gain
/// drops below tol * #sentences or after max_iters iterations.
/// Throws on a sentence without phones, or with a grapheme or phoneme that
/// the table does not know.
EmResult em_train(const Corpus& decoded, EmissionTable table, Topology topology, const EmOptions& options = {});

/// Forward log-likelihood of one sentence; -infinity when no path exists.
double sentence_log_likelihood(const SentenceHmm& hmm, const std::vector<SymbolId>& phones,
                               const EmissionTable& table, const Topology& topology);

}  // namespace lexloop::lexlearn

#endif  // LEXLOOP_LEXLEARN_BAUM_WELCH_H_
