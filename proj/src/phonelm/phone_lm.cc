// src/phonelm/phone_lm.cc

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

#include "lexloop/phonelm/phone_lm.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lexloop/core/error.h"
#include "lexloop/core/io.h"

namespace lexloop::phonelm {

PhoneLm train_lm(const std::vector<Pronunciation>& sequences, int order) {
  if (sequences.empty()) throw Error("train_lm: empty input");
  if (order < 1 || order > 7) throw Error("train_lm: order must be in [1,7]");
  PhoneLm lm;
  std::set<std::string> vocab;
  for (const auto& seq : sequences) vocab.insert(seq.begin(), seq.end());
  for (const auto& p : vocab) lm.phones_.intern(p);
  const auto events = static_cast<int>(lm.phones_.size()) + 2;
  lm.ngram_ = WittenBellNgram(order, events, events + 1);
  std::vector<std::int32_t> history;
  for (const auto& seq : sequences) {
    history.assign(1, lm.begin_id());
    for (const auto& p : seq) {
      const std::int32_t id = lm.event_id(p);
      lm.ngram_.add(history, id);
      history.push_back(id);
    }
    lm.ngram_.add(history, lm.end_id());
  }
  return lm;
}

std::int32_t PhoneLm::event_id(const std::string& phone) const {
  if (phone == kEnd) return end_id();
  if (phone == kUnk) return unk_id();
  if (phone == kBegin) return begin_id();
  auto id = phones_.find(phone);
  return id ? *id : unk_id();
}

double PhoneLm::logprob(const Pronunciation& seq) const {
  std::vector<std::int32_t> history{begin_id()};
  const std::size_t keep = static_cast<std::size_t>(order() - 1);
  double score = 0;
  for (const auto& p : seq) {
    const std::int32_t id = event_id(p);
    score += std::log(ngram_.prob(history, id));
    history.push_back(id);
    if (history.size() > keep + 1) history.erase(history.begin());
  }
  return score + std::log(ngram_.prob(history, end_id()));
}

double PhoneLm::prob(const std::vector<std::string>& history, const std::string& next) const {
  std::vector<std::int32_t> ids;
  for (const auto& h : history) ids.push_back(event_id(h));
  return ngram_.prob(ids, event_id(next));
}

double perplexity(const PhoneLm& lm, const std::vector<Pronunciation>& sequences) {
  if (sequences.empty()) throw Error("perplexity: empty input");
  double total = 0;
  std::size_t tokens = 0;
  for (const auto& seq : sequences) {
    total += lm.logprob(seq);
    tokens += seq.size() + 1;
  }
  return std::exp(-total / static_cast<double>(tokens));
}

void PhoneLm::save(std::ostream& out) const {
  out << "#phonelm v1\n";
  out << "phones " << phones_.size() << '\n';
  for (const auto& p : phones_.texts()) out << p << '\n';
  ngram_.write(out);
}

void PhoneLm::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  save(out);
  write_file_atomic(path, out.str());
}

PhoneLm PhoneLm::load(std::istream& in, const std::string& source) {
  PhoneLm lm;
  std::string line;
  if (!std::getline(in, line) || line != "#phonelm v1") throw Error(source + ": not a '#phonelm v1' file");
  std::size_t n = 0;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "phones %zu", &n) != 1) {
    throw Error(source + ": expected phones section");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw Error(source + ": truncated phones section");
    lm.phones_.intern(line);
  }
  lm.ngram_ = WittenBellNgram::read(in, source);
  if (lm.ngram_.num_events() != static_cast<int>(n) + 2) throw Error(source + ": event count mismatch");
  return lm;
}

PhoneLm PhoneLm::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return load(in, path.string());
}

}  // namespace lexloop::phonelm
