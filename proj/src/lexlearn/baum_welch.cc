// src/lexlearn/baum_welch.cc

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

#include "lexloop/lexlearn/baum_welch.h"

#include <cmath>
#include <limits>

#include "lexloop/core/error.h"

namespace lexloop::lexlearn {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Expected counts pooled over sentences.
struct Accumulator {
  std::vector<double> emissions;  // graphemes x phonemes
  double loop = 0, advance = 0, skip = 0;
};

// Scaled forward-backward over one sentence HMM. Time t counts emitted
// phonemes (0..T); row t of `alpha` is the state distribution right after
// the t-th emission, `entry`/`exit` are the non-emitting word boundary
// masses at time t.
class ForwardBackward {
 public:
  ForwardBackward(const SentenceHmm& hmm, const std::vector<SymbolId>& obs, const EmissionTable& table,
                  const Topology& topo)
      : hmm_(hmm), obs_(obs), table_(table), topo_(topo), T_(obs.size()), S_(hmm.num_states()),
        W_(hmm.num_words()) {}

  // Returns the log-likelihood, or -inf when no path emits the sequence.
  double forward();
  // Requires a finite forward(). Adds posterior counts to `acc`.
  void backward_and_accumulate(Accumulator& acc);

 private:
  double exit_prob(int pos, int len) const {
    return (pos == len - 1 ? topo_.advance + topo_.skip : 0.0) + (pos == len - 2 ? topo_.skip : 0.0);
  }
  double& alpha(std::size_t t, int s) { return alpha_[t * S_ + s]; }
  double& beta(std::size_t t, int s) { return beta_[t * S_ + s]; }
  double& em(std::size_t t, int s) { return em_[t * S_ + s]; }
  double& entry(std::size_t t, int w) { return entry_[t * W_ + w]; }
  double& exit(std::size_t t, int w) { return exit_[t * W_ + w]; }
  double& out(std::size_t t, int w) { return out_[t * W_ + w]; }

  const SentenceHmm& hmm_;
  const std::vector<SymbolId>& obs_;
  const EmissionTable& table_;
  const Topology& topo_;
  std::size_t T_;
  int S_, W_;
  std::vector<double> alpha_, beta_, em_, entry_, exit_, out_, scale_;
  double final_ = 0;  // scaled probability of the whole sequence
};

double ForwardBackward::forward() {
  alpha_.assign((T_ + 1) * S_, 0.0);
  em_.assign((T_ + 1) * S_, 0.0);
  entry_.assign((T_ + 1) * W_, 0.0);
  exit_.assign((T_ + 1) * W_, 0.0);
  scale_.assign(T_ + 1, 1.0);

  for (std::size_t t = 1; t <= T_; ++t) {
    for (int s = 0; s < S_; ++s) em(t, s) = table_.prob(hmm_.state_grapheme[s], obs_[t - 1]);
  }

  const double e0 = topo_.enter_first, e1 = topo_.enter_second;
  const auto boundaries = [&](std::size_t t) {
    for (int w = 0; w < W_; ++w) {
      if (w > 0) entry(t, w) = exit(t, w - 1);
      const int b = hmm_.word_begin[w], len = hmm_.word_length(w);
      double x = len == 1 ? entry(t, w) * e1 : 0.0;
      for (int pos = std::max(0, len - 2); pos < len; ++pos) x += alpha(t, b + pos) * exit_prob(pos, len);
      exit(t, w) = x;
    }
  };

  entry(0, 0) = 1.0;
  boundaries(0);
  double log_scale = 0;
  for (std::size_t t = 1; t <= T_; ++t) {
    double total = 0;
    for (int w = 0; w < W_; ++w) {
      const int b = hmm_.word_begin[w], len = hmm_.word_length(w);
      for (int pos = 0; pos < len; ++pos) {
        const int s = b + pos;
        double v = alpha(t - 1, s) * topo_.loop;
        if (pos >= 1) v += alpha(t - 1, s - 1) * topo_.advance;
        if (pos >= 2) v += alpha(t - 1, s - 2) * topo_.skip;
        if (pos == 0) v += entry(t - 1, w) * e0;
        if (pos == 1) v += entry(t - 1, w) * e1;
        v *= em(t, s);
        alpha(t, s) = v;
        total += v;
      }
    }
    if (!(total > 0)) return kNegInf;
    scale_[t] = total;
    log_scale += std::log(total);
    const double inv = 1.0 / total;
    for (int s = 0; s < S_; ++s) alpha(t, s) *= inv;
    boundaries(t);
  }
  final_ = exit(T_, W_ - 1);
  if (!(final_ > 0)) return kNegInf;
  return log_scale + std::log(final_);
}

void ForwardBackward::backward_and_accumulate(Accumulator& acc) {
  beta_.assign((T_ + 1) * S_, 0.0);
  out_.assign((T_ + 1) * W_, 0.0);
  const double e0 = topo_.enter_first, e1 = topo_.enter_second;
  const std::size_t P = table_.num_phonemes();

  // entry_back = probability of the remaining observations given that word w
  // is entered at time t (scaled like beta at t).
  std::vector<double> entry_back(W_);
  for (std::size_t t = T_ + 1; t-- > 0;) {
    const double inv_next = t < T_ ? 1.0 / scale_[t + 1] : 0.0;
    for (int w = W_ - 1; w >= 0; --w) {
      out(t, w) = w == W_ - 1 ? (t == T_ ? 1.0 : 0.0) : entry_back[w + 1];
      const int b = hmm_.word_begin[w], len = hmm_.word_length(w);
      for (int pos = 0; pos < len; ++pos) {
        const int s = b + pos;
        double v = exit_prob(pos, len) * out(t, w);
        if (t < T_) {
          double inner = topo_.loop * em(t + 1, s) * beta(t + 1, s);
          if (pos + 1 < len) inner += topo_.advance * em(t + 1, s + 1) * beta(t + 1, s + 1);
          if (pos + 2 < len) inner += topo_.skip * em(t + 1, s + 2) * beta(t + 1, s + 2);
          v += inner * inv_next;
        }
        beta(t, s) = v;
      }
      double eb = len == 1 ? e1 * out(t, w) : 0.0;
      if (t < T_) {
        double inner = e0 * em(t + 1, b) * beta(t + 1, b);
        if (len >= 2) inner += e1 * em(t + 1, b + 1) * beta(t + 1, b + 1);
        eb += inner * inv_next;
      }
      entry_back[w] = eb;
    }
  }

  const double inv_final = 1.0 / final_;
  for (std::size_t t = 1; t <= T_; ++t) {
    const std::size_t o = static_cast<std::size_t>(obs_[t - 1]);
    const double inv_next = t < T_ ? 1.0 / scale_[t + 1] : 0.0;
    for (int w = 0; w < W_; ++w) {
      const int b = hmm_.word_begin[w], len = hmm_.word_length(w);
      const double out_t = out(t, w);
      for (int pos = 0; pos < len; ++pos) {
        const int s = b + pos;
        const double a = alpha(t, s);
        if (a == 0.0) continue;
        const double gamma = a * beta(t, s) * inv_final;
        acc.emissions[static_cast<std::size_t>(hmm_.state_grapheme[s]) * P + o] += gamma;
        if (t < T_) {
          const double k = a * inv_next * inv_final;
          acc.loop += k * topo_.loop * em(t + 1, s) * beta(t + 1, s);
          if (pos + 1 < len) acc.advance += k * topo_.advance * em(t + 1, s + 1) * beta(t + 1, s + 1);
          if (pos + 2 < len) acc.skip += k * topo_.skip * em(t + 1, s + 2) * beta(t + 1, s + 2);
        }
        if (out_t != 0.0) {
          if (pos == len - 1) {
            acc.advance += a * topo_.advance * out_t * inv_final;
            acc.skip += a * topo_.skip * out_t * inv_final;
          } else if (pos == len - 2) {
            acc.skip += a * topo_.skip * out_t * inv_final;
          }
        }
      }
    }
  }
}

struct PreparedSentence {
  SentenceHmm hmm;
  std::vector<SymbolId> phones;
};

}  // namespace

double sentence_log_likelihood(const SentenceHmm& hmm, const std::vector<SymbolId>& phones,
                               const EmissionTable& table, const Topology& topology) {
  ForwardBackward fb(hmm, phones, table, topology);
  return fb.forward();
}

EmResult em_train(const Corpus& decoded, EmissionTable table, Topology topology, const EmOptions& options) {
  topology.validate();
  std::vector<PreparedSentence> sentences;
  sentences.reserve(decoded.sentences.size());
  for (std::size_t i = 0; i < decoded.sentences.size(); ++i) {
    const auto& s = decoded.sentences[i];
    if (!s.phones) throw Error("em_train: sentence " + std::to_string(i + 1) + " has no decoded phones");
    sentences.push_back({SentenceHmm::build(s.words, table), phoneme_ids(*s.phones, table)});
  }

  EmResult result{std::move(table), topology, {}, {}};
  const std::size_t G = result.table.num_graphemes(), P = result.table.num_phonemes();
  std::vector<bool> skipped(sentences.size(), false);
  double previous = kNegInf;
  for (int iter = 0; iter < options.max_iters; ++iter) {
    Accumulator acc;
    acc.emissions.assign(G * P, 0.0);
    double total = 0;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (skipped[i]) continue;
      ForwardBackward fb(sentences[i].hmm, sentences[i].phones, result.table, result.topology);
      const double ll = fb.forward();
      if (!std::isfinite(ll)) {
        skipped[i] = true;
        continue;
      }
      total += ll;
      fb.backward_and_accumulate(acc);
    }
    result.log_likelihood.push_back(total);

    for (std::size_t g = 0; g < G; ++g) {
      result.table.reestimate_row(static_cast<SymbolId>(g), std::span<const double>(acc.emissions).subspan(g * P, P));
    }
    const double moves = acc.loop + acc.advance + acc.skip;
    if (options.update_transitions && moves > 0) {
      result.topology.loop = acc.loop / moves;
      result.topology.advance = acc.advance / moves;
      result.topology.skip = acc.skip / moves;
    }
    if (total - previous < options.tol * static_cast<double>(sentences.size())) break;
    previous = total;
  }
  for (std::size_t i = 0; i < skipped.size(); ++i) {
    if (skipped[i]) result.skipped.push_back(i);
  }
  return result;
}

}  // namespace lexloop::lexlearn
