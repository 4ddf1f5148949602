// src/lexlearn/viterbi.cc

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

#include "lexloop/lexlearn/viterbi.h"

#include <cmath>
#include <limits>

#include "lexloop/core/error.h"
#include "lexloop/core/text.h"

namespace lexloop::lexlearn {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0 ? std::log(p) : kNegInf; }

// Where a lattice node got its score from.
struct Back {
  enum Kind : std::int8_t { kNone, kState, kEntry } kind = kNone;
  int index = -1;  // state or word index, at time t-1 for emitting moves
};

}  // namespace

Alignment viterbi_align(const std::vector<std::string>& words, const Pronunciation& phones,
                        const EmissionTable& table, const Topology& topology) {
  topology.validate();
  const SentenceHmm hmm = SentenceHmm::build(words, table);
  const std::vector<SymbolId> obs = phoneme_ids(phones, table);
  const std::size_t T = obs.size();
  const int S = hmm.num_states(), W = hmm.num_words();

  const double l_loop = safe_log(topology.loop), l_adv = safe_log(topology.advance),
               l_skip = safe_log(topology.skip), l_e0 = safe_log(topology.enter_first),
               l_e1 = safe_log(topology.enter_second);

  std::vector<double> v((T + 1) * S, kNegInf), entry((T + 1) * W, kNegInf), exit((T + 1) * W, kNegInf);
  std::vector<Back> v_back((T + 1) * S), entry_back((T + 1) * W), exit_back((T + 1) * W);

  const auto relax = [](double& best, Back& back, double cand, Back from) {
    if (cand > best) {
      best = cand;
      back = from;
    }
  };

  // Non-emitting boundary nodes at time t, words left to right.
  const auto boundaries = [&](std::size_t t) {
    for (int w = 0; w < W; ++w) {
      const std::size_t i = t * W + w;
      if (w > 0) {
        entry[i] = exit[i - 1];
        entry_back[i] = {Back::kNone, w - 1};
      }
      const int b = hmm.word_begin[w], len = hmm.word_length(w);
      const int last = b + len - 1;
      double best = kNegInf;
      Back back;
      relax(best, back, v[t * S + last] + l_adv, {Back::kState, last});
      if (len == 1) relax(best, back, entry[i] + l_e1, {Back::kEntry, w});
      if (len >= 2) relax(best, back, v[t * S + last - 1] + l_skip, {Back::kState, last - 1});
      relax(best, back, v[t * S + last] + l_skip, {Back::kState, last});
      exit[i] = best;
      exit_back[i] = back;
    }
  };

  entry[0] = 0.0;
  boundaries(0);
  for (std::size_t t = 1; t <= T; ++t) {
    const SymbolId o = obs[t - 1];
    for (int w = 0; w < W; ++w) {
      const int b = hmm.word_begin[w], len = hmm.word_length(w);
      const std::size_t ei = (t - 1) * W + w;
      for (int pos = 0; pos < len; ++pos) {
        const int s = b + pos;
        const std::size_t prev = (t - 1) * S;
        double best = kNegInf;
        Back back;
        if (pos == 0) {
          relax(best, back, entry[ei] + l_e0, {Back::kEntry, w});
        } else {
          relax(best, back, v[prev + s - 1] + l_adv, {Back::kState, s - 1});
        }
        relax(best, back, v[prev + s] + l_loop, {Back::kState, s});
        if (pos == 1) relax(best, back, entry[ei] + l_e1, {Back::kEntry, w});
        if (pos >= 2) relax(best, back, v[prev + s - 2] + l_skip, {Back::kState, s - 2});
        if (best > kNegInf) best += std::log(table.prob(hmm.state_grapheme[s], o));
        v[t * S + s] = best;
        v_back[t * S + s] = back;
      }
    }
    boundaries(t);
  }

  const double score = exit[T * W + W - 1];
  if (!(score > kNegInf)) {
    throw AlignmentError("no path emits " + std::to_string(T) + " phonemes for '" + join(words) + "'");
  }

  // Traceback. A word's span runs from the time it is entered to the time it
  // is left; both are boundary-node times.
  Alignment result;
  result.log_score = score;
  result.states.assign(T, -1);
  result.spans.assign(W, {});
  std::size_t t = T;
  int w = W - 1;
  Back at = exit_back[T * W + w];
  result.spans[w].end = T;
  while (true) {
    if (at.kind == Back::kEntry) {
      // Entry of word w at time t.
      result.spans[w].begin = t;
      if (w == 0) break;
      --w;
      result.spans[w].end = t;
      at = exit_back[t * W + w];
      continue;
    }
    // State `at.index` at time t emitted phoneme t-1.
    const int s = at.index;
    result.states[t - 1] = s;
    at = v_back[t * S + s];
    --t;
  }
  if (t != 0) throw Error("viterbi traceback did not reach the start");
  return result;
}

CorpusAlignment align_corpus(const Corpus& decoded, const EmissionTable& table, const Topology& topology) {
  CorpusAlignment out;
  out.sentences.reserve(decoded.sentences.size());
  for (std::size_t i = 0; i < decoded.sentences.size(); ++i) {
    const auto& s = decoded.sentences[i];
    if (!s.phones) throw Error("align_corpus: sentence " + std::to_string(i + 1) + " has no decoded phones");
    try {
      out.sentences.emplace_back(viterbi_align(s.words, *s.phones, table, topology));
    } catch (const AlignmentError&) {
      out.sentences.emplace_back(std::nullopt);
      ++out.failed;
    }
  }
  return out;
}

}  // namespace lexloop::lexlearn
