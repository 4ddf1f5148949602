// src/g2p/g2p_model.cc

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

#include "lexloop/g2p/g2p_model.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lexloop/core/error.h"
#include "lexloop/core/io.h"
#include "lexloop/core/text.h"
#include "lexloop/util/rng.h"

namespace lexloop::g2p {
namespace {

// (graphemes, phonemes) per chunk. The tag graphone is not part of this set.
constexpr std::pair<int, int> kChunkShapes[] = {{1, 1}, {1, 0}, {1, 2}, {2, 1}};

struct Edge {
  int from;
  int to;
  int candidate;
};

// Alignment lattice of one training entry, nodes (i, j) = i graphemes and j
// phonemes consumed, stored in topological order.
struct Lattice {
  int width = 0;  // phonemes + 1
  int num_nodes = 0;
  std::vector<Edge> edges;  // sorted by `to`
  double weight = 1.0;
};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_ids(const std::vector<SymbolId>& ids) {
  if (ids.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<SymbolId> split_ids(const std::string& text) {
  std::vector<SymbolId> ids;
  if (text == "-") return ids;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) ids.push_back(std::stoi(item));
  return ids;
}

template <typename Key>
std::vector<SymbolId> intern_all(SymbolTable& table, const std::vector<Key>& items) {
  std::vector<SymbolId> ids;
  ids.reserve(items.size());
  for (const auto& s : items) ids.push_back(*table.find(s));
  return ids;
}

}  // namespace

G2pModel train_g2p(const std::vector<TaggedEntry>& data, const TrainOptions& options) {
  if (data.empty()) throw Error("train_g2p: empty training data");
  if (options.order < 1 || options.order > 5) throw Error("train_g2p: order must be in [1,5]");

  std::vector<std::string> bad_words;
  std::set<std::string> grapheme_texts, phoneme_texts, tag_texts;
  for (const auto& e : data) {
    if (e.weight <= 0) throw Error("train_g2p: non-positive weight for '" + e.word.surface + "'");
    if (e.pron.empty()) throw Error("train_g2p: empty pronunciation for '" + e.word.surface + "'");
    if (e.word.graphemes.empty()) throw Error("train_g2p: empty word");
    if (e.pron.size() > 2 * e.word.graphemes.size()) bad_words.push_back(e.word.surface);
    grapheme_texts.insert(e.word.graphemes.begin(), e.word.graphemes.end());
    phoneme_texts.insert(e.pron.begin(), e.pron.end());
    tag_texts.insert(e.language_tag);
  }
  if (!bad_words.empty()) {
    throw Error("train_g2p: no legal chunking (more than 2 phonemes per grapheme) for: " + join(bad_words, ", "));
  }

  G2pModel model;
  for (const auto& g : grapheme_texts) model.graphemes_.intern(g);
  for (const auto& p : phoneme_texts) model.phonemes_.intern(p);
  model.tags_.assign(tag_texts.begin(), tag_texts.end());
  model.tag_phonemes_.assign(model.tags_.size(), std::vector<bool>(model.phonemes_.size(), false));

  // Candidate chunks in sorted order so candidate index == final graphone order.
  std::map<G2pModel::Chunk, int> candidate_index;
  std::vector<std::vector<SymbolId>> word_ids, pron_ids;
  for (const auto& e : data) {
    word_ids.push_back(intern_all(model.graphemes_, e.word.graphemes));
    pron_ids.push_back(intern_all(model.phonemes_, e.pron));
    const int tag = model.tag_index(e.language_tag);
    for (SymbolId p : pron_ids.back()) model.tag_phonemes_[tag][p] = true;
    const auto& g = word_ids.back();
    const auto& p = pron_ids.back();
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (std::size_t j = 0; j <= p.size(); ++j) {
        for (auto [dg, dp] : kChunkShapes) {
          if (i + dg > g.size() || j + dp > p.size()) continue;
          G2pModel::Chunk c{{g.begin() + i, g.begin() + i + dg}, {p.begin() + j, p.begin() + j + dp}};
          candidate_index.emplace(std::move(c), 0);
        }
      }
    }
  }
  std::vector<G2pModel::Chunk> candidates;
  for (auto& [chunk, index] : candidate_index) {
    index = static_cast<int>(candidates.size());
    candidates.push_back(chunk);
  }

  std::vector<Lattice> lattices;
  lattices.reserve(data.size());
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto& g = word_ids[n];
    const auto& p = pron_ids[n];
    Lattice lat;
    lat.width = static_cast<int>(p.size()) + 1;
    lat.num_nodes = static_cast<int>(g.size() + 1) * lat.width;
    lat.weight = data[n].weight;
    for (int i = 0; i < static_cast<int>(g.size()); ++i) {
      for (int j = 0; j <= static_cast<int>(p.size()); ++j) {
        for (auto [dg, dp] : kChunkShapes) {
          if (i + dg > static_cast<int>(g.size()) || j + dp > static_cast<int>(p.size())) continue;
          G2pModel::Chunk c{{g.begin() + i, g.begin() + i + dg}, {p.begin() + j, p.begin() + j + dp}};
          lat.edges.push_back({i * lat.width + j, (i + dg) * lat.width + j + dp, candidate_index.at(c)});
        }
      }
    }
    std::stable_sort(lat.edges.begin(), lat.edges.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    lattices.push_back(std::move(lat));
  }

  // Uniform start with a small seeded perturbation so symmetric alignments
  // do not sit on a saddle point.
  std::vector<double> probs(candidates.size());
  {
    CounterRng rng(options.seed, 0x67327021);
    double total = 0;
    for (auto& p : probs) total += (p = 1.0 + 0.01 * rng.uniform());
    for (auto& p : probs) p /= total;
  }

  std::vector<double> alpha, beta, counts(candidates.size());
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.em_iters; ++iter) {
    std::fill(counts.begin(), counts.end(), 0.0);
    double ll = 0;
    for (const auto& lat : lattices) {
      alpha.assign(lat.num_nodes, 0.0);
      beta.assign(lat.num_nodes, 0.0);
      alpha[0] = 1.0;
      for (const auto& e : lat.edges) alpha[e.to] += alpha[e.from] * probs[e.candidate];
      beta[lat.num_nodes - 1] = 1.0;
      for (auto it = lat.edges.rbegin(); it != lat.edges.rend(); ++it) {
        beta[it->from] += probs[it->candidate] * beta[it->to];
      }
      const double total = alpha[lat.num_nodes - 1];
      if (!(total > 0)) continue;  // every path uses a zero-probability chunk
      ll += lat.weight * std::log(total);
      for (const auto& e : lat.edges) {
        counts[e.candidate] += lat.weight * alpha[e.from] * probs[e.candidate] * beta[e.to] / total;
      }
    }
    model.em_trace_.push_back(ll);
    double sum = 0;
    for (double c : counts) sum += c;
    for (std::size_t c = 0; c < probs.size(); ++c) probs[c] = counts[c] / sum;
    if (ll - prev_ll < 1e-4 * static_cast<double>(data.size())) break;
    prev_ll = ll;
  }

  // Viterbi alignment of every entry; the first edge wins ties.
  std::vector<std::vector<int>> alignments(data.size());
  std::set<int> used;
  for (std::size_t n = 0; n < lattices.size(); ++n) {
    const auto& lat = lattices[n];
    std::vector<double> best(lat.num_nodes, -std::numeric_limits<double>::infinity());
    std::vector<int> back(lat.num_nodes, -1);
    best[0] = 0;
    for (std::size_t k = 0; k < lat.edges.size(); ++k) {
      const auto& e = lat.edges[k];
      if (probs[e.candidate] <= 0) continue;
      const double s = best[e.from] + std::log(probs[e.candidate]);
      if (s > best[e.to]) {
        best[e.to] = s;
        back[e.to] = static_cast<int>(k);
      }
    }
    if (back[lat.num_nodes - 1] < 0) {
      throw Error("train_g2p: no alignment with non-zero probability for '" + data[n].word.surface + "'");
    }
    for (int node = lat.num_nodes - 1; node != 0;) {
      const auto& e = lat.edges[back[node]];
      alignments[n].push_back(e.candidate);
      node = e.from;
    }
    std::reverse(alignments[n].begin(), alignments[n].end());
    used.insert(alignments[n].begin(), alignments[n].end());
  }

  // Every grapheme gets at least one single-grapheme graphone so that words
  // can always be segmented.
  for (SymbolId g = 0; g < static_cast<SymbolId>(model.graphemes_.size()); ++g) {
    int best = -1;
    bool covered = false;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (candidates[c].graphemes.size() != 1 || candidates[c].graphemes[0] != g) continue;
      if (used.count(static_cast<int>(c))) {
        covered = true;
        break;
      }
      if (best < 0 || probs[c] > probs[best]) best = static_cast<int>(c);
    }
    if (!covered && best >= 0) used.insert(best);
  }

  std::vector<int> remap(candidates.size(), -1);
  for (int c : used) {
    remap[c] = static_cast<int>(model.graphones_.size());
    model.graphones_.push_back(candidates[c]);
    model.chunk_probs_.push_back(probs[c]);
  }

  const int num_graphones = static_cast<int>(model.graphones_.size());
  model.ngram_ = WittenBellNgram(options.order, num_graphones + 1,
                                 num_graphones + 2 + static_cast<int>(model.tags_.size()));
  for (std::size_t n = 0; n < data.size(); ++n) {
    std::vector<std::int32_t> history = model.initial_history(data[n].language_tag);
    for (int c : alignments[n]) {
      model.ngram_.add(history, remap[c], data[n].weight);
      history.push_back(remap[c]);
    }
    model.ngram_.add(history, model.end_event(), data[n].weight);
  }
  model.index_chunks();
  return model;
}

G2pModel fine_tune(const std::vector<TaggedEntry>& model_data, const std::vector<TaggedEntry>& target,
                   double lambda, const TrainOptions& options) {
  if (target.empty()) throw Error("fine_tune: empty target data");
  if (!(lambda >= 1.0)) throw Error("fine_tune: lambda must be >= 1");
  std::vector<TaggedEntry> pooled = model_data;
  for (auto e : target) {
    e.weight *= lambda;
    pooled.push_back(std::move(e));
  }
  G2pModel model = train_g2p(pooled, options);
  model.lambda_ = lambda;
  return model;
}

void G2pModel::index_chunks() {
  std::map<std::vector<SymbolId>, std::vector<int>> index;
  for (std::size_t c = 0; c < graphones_.size(); ++c) index[graphones_[c].graphemes].push_back(static_cast<int>(c));
  by_chunk_.assign(index.begin(), index.end());
}

int G2pModel::tag_index(std::string_view tag) const {
  auto it = std::lower_bound(tags_.begin(), tags_.end(), tag);
  if (it == tags_.end() || *it != tag) return -1;
  return static_cast<int>(it - tags_.begin());
}

std::vector<std::int32_t> G2pModel::initial_history(std::string_view tag) const {
  std::vector<std::int32_t> history{begin_symbol()};
  if (const int t = tag_index(tag); t >= 0) history.push_back(begin_symbol() + 1 + t);
  return history;
}

bool G2pModel::allowed(int tag, int graphone) const {
  for (SymbolId p : graphones_[graphone].phonemes) {
    if (!tag_phonemes_[tag][p]) return false;
  }
  return true;
}

std::vector<Graphone> G2pModel::graphones() const {
  std::vector<Graphone> out;
  for (const auto& c : graphones_) {
    Graphone g;
    for (SymbolId id : c.graphemes) g.graphemes.push_back(graphemes_.text(id));
    for (SymbolId id : c.phonemes) g.phonemes.push_back(phonemes_.text(id));
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<int> G2pModel::graphones_for(std::span<const std::string> graphemes) const {
  std::vector<SymbolId> ids;
  for (const auto& g : graphemes) {
    auto id = graphemes_.find(g);
    if (!id) return {};
    ids.push_back(*id);
  }
  auto it = std::lower_bound(by_chunk_.begin(), by_chunk_.end(), ids,
                             [](const auto& entry, const auto& key) { return entry.first < key; });
  if (it == by_chunk_.end() || it->first != ids) return {};
  return it->second;
}

double G2pModel::log_prob(std::string_view tag, std::span<const int> graphone_ids) const {
  std::vector<std::int32_t> history = initial_history(tag);
  double score = 0;
  for (int c : graphone_ids) {
    score += std::log(ngram_.prob(history, c));
    history.push_back(c);
  }
  return score + std::log(ngram_.prob(history, end_event()));
}

Pronunciation G2pModel::predict(std::string_view tag, const Word& word, int beam) const {
  if (beam < 1) throw Error("predict: beam must be >= 1");
  std::vector<SymbolId> ids;
  for (const auto& g : word.graphemes) {
    auto id = graphemes_.find(g);
    if (!id) throw OovError(g);
    ids.push_back(*id);
  }
  if (ids.empty()) throw Error("predict: empty word");
  const int tag_id = tag_index(tag);
  bool found = false;
  Pronunciation pron;
  if (tag_id >= 0) pron = search(ids, tag_id, /*filter=*/true, beam, &found);
  // A grapheme may only ever have been seen in another language; fall back
  // to the unrestricted phoneme set rather than failing.
  if (!found) pron = search(ids, tag_id, /*filter=*/false, beam, &found);
  if (!found) throw Error("predict: no graphone segmentation for '" + word.surface + "'");
  return pron;
}

Pronunciation G2pModel::search(const std::vector<SymbolId>& graphemes, int tag, bool filter, int beam,
                               bool* found) const {
  struct Hyp {
    double score;
    std::vector<int> seq;
    std::vector<std::int32_t> history;
  };
  const auto better = [](const Hyp& a, const Hyp& b) {
    return a.score != b.score ? a.score > b.score : a.seq < b.seq;
  };
  const std::size_t keep = static_cast<std::size_t>(order() - 1);
  const auto trim = [keep](std::vector<std::int32_t>& h) {
    if (h.size() > keep) h.erase(h.begin(), h.end() - static_cast<std::ptrdiff_t>(keep));
  };

  const std::size_t n = graphemes.size();
  std::vector<std::vector<Hyp>> at(n + 1);
  std::vector<std::map<std::vector<std::int32_t>, std::size_t>> recombine(n + 1);
  {
    Hyp start{0.0, {}, tag >= 0 ? std::vector<std::int32_t>{begin_symbol(), begin_symbol() + 1 + tag}
                                : std::vector<std::int32_t>{begin_symbol()}};
    trim(start.history);
    at[0].push_back(std::move(start));
  }

  std::vector<SymbolId> chunk;
  for (std::size_t pos = 0; pos < n; ++pos) {
    auto& current = at[pos];
    std::sort(current.begin(), current.end(), better);
    if (current.size() > static_cast<std::size_t>(beam)) current.resize(static_cast<std::size_t>(beam));
    for (const Hyp& hyp : current) {
      for (std::size_t len = 1; len <= 2 && pos + len <= n; ++len) {
        chunk.assign(graphemes.begin() + static_cast<std::ptrdiff_t>(pos),
                     graphemes.begin() + static_cast<std::ptrdiff_t>(pos + len));
        auto it = std::lower_bound(by_chunk_.begin(), by_chunk_.end(), chunk,
                                   [](const auto& entry, const auto& key) { return entry.first < key; });
        if (it == by_chunk_.end() || it->first != chunk) continue;
        for (int c : it->second) {
          if (filter && !allowed(tag, c)) continue;
          Hyp next{hyp.score + std::log(ngram_.prob(hyp.history, c)), hyp.seq, hyp.history};
          next.seq.push_back(c);
          next.history.push_back(c);
          trim(next.history);
          auto& bucket = at[pos + len];
          auto [slot, inserted] = recombine[pos + len].emplace(next.history, bucket.size());
          if (inserted) {
            bucket.push_back(std::move(next));
          } else if (better(next, bucket[slot->second])) {
            bucket[slot->second] = std::move(next);
          }
        }
      }
    }
    current.clear();
  }

  const Hyp* best = nullptr;
  double best_score = 0;
  for (const Hyp& hyp : at[n]) {
    const double s = hyp.score + std::log(ngram_.prob(hyp.history, end_event()));
    if (!best || s > best_score || (s == best_score && hyp.seq < best->seq)) {
      best = &hyp;
      best_score = s;
    }
  }
  *found = best != nullptr;
  Pronunciation pron;
  if (best) {
    for (int c : best->seq) {
      for (SymbolId p : graphones_[c].phonemes) pron.push_back(phonemes_.text(p));
    }
  }
  return pron;
}

void G2pModel::save(std::ostream& out) const {
  out << "#g2pmodel v1\n";
  out << "lambda " << format_double(lambda_) << '\n';
  out << "em_trace " << em_trace_.size();
  for (double v : em_trace_) out << ' ' << format_double(v);
  out << '\n';
  out << "graphemes " << graphemes_.size() << '\n';
  for (const auto& t : graphemes_.texts()) out << t << '\n';
  out << "phonemes " << phonemes_.size() << '\n';
  for (const auto& t : phonemes_.texts()) out << t << '\n';
  out << "tags " << tags_.size() << '\n';
  for (std::size_t t = 0; t < tags_.size(); ++t) {
    out << tags_[t];
    for (std::size_t p = 0; p < tag_phonemes_[t].size(); ++p) {
      if (tag_phonemes_[t][p]) out << ' ' << p;
    }
    out << '\n';
  }
  out << "graphones " << graphones_.size() << '\n';
  for (std::size_t c = 0; c < graphones_.size(); ++c) {
    out << join_ids(graphones_[c].graphemes) << '\t' << join_ids(graphones_[c].phonemes) << '\t'
        << format_double(chunk_probs_[c]) << '\n';
  }
  ngram_.write(out);
}

void G2pModel::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  save(out);
  write_file_atomic(path, out.str());
}

G2pModel G2pModel::load(std::istream& in, const std::string& source) {
  G2pModel model;
  std::string line;
  std::size_t line_no = 0;
  const auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw ParseError(source, line_no, "unexpected end of model");
    ++line_no;
    return line;
  };
  const auto section = [&](const std::string& name) -> std::size_t {
    std::istringstream head(next_line());
    std::string got;
    std::size_t n = 0;
    if (!(head >> got >> n) || got != name) throw ParseError(source, line_no, "expected section '" + name + "'");
    return n;
  };

  if (next_line() != "#g2pmodel v1") throw ParseError(source, line_no, "not a '#g2pmodel v1' file");
  {
    std::istringstream head(next_line());
    std::string got, value;
    if (!(head >> got >> value) || got != "lambda") throw ParseError(source, line_no, "expected lambda");
    model.lambda_ = std::stod(value);
  }
  {
    std::istringstream head(next_line());
    std::string got;
    std::size_t n = 0;
    if (!(head >> got >> n) || got != "em_trace") throw ParseError(source, line_no, "expected em_trace");
    std::string value;
    while (head >> value) model.em_trace_.push_back(std::stod(value));
    if (model.em_trace_.size() != n) throw ParseError(source, line_no, "em_trace length mismatch");
  }
  for (std::size_t i = 0, n = section("graphemes"); i < n; ++i) model.graphemes_.intern(next_line());
  for (std::size_t i = 0, n = section("phonemes"); i < n; ++i) model.phonemes_.intern(next_line());
  for (std::size_t i = 0, n = section("tags"); i < n; ++i) {
    std::istringstream row(next_line());
    std::string tag;
    row >> tag;
    model.tags_.push_back(tag);
    std::vector<bool> mask(model.phonemes_.size(), false);
    std::size_t p;
    while (row >> p) mask.at(p) = true;
    model.tag_phonemes_.push_back(std::move(mask));
  }
  for (std::size_t i = 0, n = section("graphones"); i < n; ++i) {
    const std::string& row = next_line();
    const auto t1 = row.find('\t');
    const auto t2 = row.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) throw ParseError(source, line_no, "bad graphone row");
    model.graphones_.push_back({split_ids(row.substr(0, t1)), split_ids(row.substr(t1 + 1, t2 - t1 - 1))});
    model.chunk_probs_.push_back(std::stod(row.substr(t2 + 1)));
  }
  model.ngram_ = WittenBellNgram::read(in, source);
  model.index_chunks();
  return model;
}

G2pModel G2pModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return load(in, path.string());
}

ApplyResult apply_g2p(const G2pModel& model, std::string_view tag, const std::vector<Word>& vocabulary, int beam) {
  ApplyResult result;
  for (const auto& word : vocabulary) {
    try {
      Pronunciation pron = model.predict(tag, word, beam);
      if (pron.empty()) {
        result.skipped.emplace_back(word.surface, "empty pronunciation");
        continue;
      }
      result.lexicon.add(word.surface, {std::move(pron), Provenance::kG2p, 0});
    } catch (const Error& e) {
      result.skipped.emplace_back(word.surface, e.what());
    }
  }
  return result;
}

std::vector<TaggedEntry> tagged_entries(const Lexicon& lex, const std::string& tag, double weight) {
  std::vector<TaggedEntry> out;
  for (const auto& [word, variants] : lex.entries()) {
    const Word w = Word::from_surface(word);
    for (const auto& v : variants) out.push_back({tag, w, v.pron, weight});
  }
  return out;
}

}  // namespace lexloop::g2p
