// src/util/witten_bell.cc

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

#include "lexloop/util/witten_bell.h"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "lexloop/core/error.h"

namespace lexloop {
namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

WittenBellNgram::WittenBellNgram(int order, int num_events, int num_symbols)
    : order_(order), num_events_(num_events), num_symbols_(num_symbols) {
  if (order < 1) throw Error("n-gram order must be >= 1");
  if (num_events < 1 || num_symbols < num_events) throw Error("bad n-gram vocabulary size");
  bits_ = std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(num_symbols))));
  if (bits_ * (order - 1) > 64) throw Error("n-gram history does not fit the packed key");
}

std::uint64_t WittenBellNgram::key(std::span<const std::int32_t> history, std::size_t n) const {
  // Most recent id in the low bits; slot value is id + 1 so that contexts of
  // different lengths never collide.
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<std::uint64_t>(history[history.size() - 1 - i]) + 1;
    k |= id << (static_cast<std::size_t>(bits_) * i);
  }
  return k;
}

std::vector<std::int32_t> WittenBellNgram::unpack(std::uint64_t k) const {
  std::vector<std::int32_t> ids;
  const std::uint64_t mask = bits_ == 64 ? ~0ULL : ((1ULL << bits_) - 1);
  while (k != 0) {
    ids.push_back(static_cast<std::int32_t>((k & mask) - 1));
    k = bits_ == 64 ? 0 : k >> bits_;
  }
  std::reverse(ids.begin(), ids.end());
  return ids;
}

void WittenBellNgram::add(std::span<const std::int32_t> history, std::int32_t event, double weight) {
  if (event < 0 || event >= num_events_) throw Error("n-gram event id out of range");
  const std::size_t max_n = std::min(history.size(), static_cast<std::size_t>(order_ - 1));
  for (std::size_t n = 0; n <= max_n; ++n) {
    Node& node = nodes_[key(history, n)];
    node.total += weight;
    node.next[event] += weight;
  }
}

double WittenBellNgram::prob(std::span<const std::int32_t> history, std::int32_t event) const {
  double p = 1.0 / num_events_;
  const std::size_t max_n = std::min(history.size(), static_cast<std::size_t>(order_ - 1));
  for (std::size_t n = 0; n <= max_n; ++n) {
    auto it = nodes_.find(key(history, n));
    if (it == nodes_.end()) break;
    const Node& node = it->second;
    const double types = static_cast<double>(node.next.size());
    auto c = node.next.find(event);
    const double count = c == node.next.end() ? 0.0 : c->second;
    p = (count + types * p) / (node.total + types);
  }
  return p;
}

double WittenBellNgram::ml_prob(std::span<const std::int32_t> history, std::int32_t event) const {
  const std::size_t n = std::min(history.size(), static_cast<std::size_t>(order_ - 1));
  auto it = nodes_.find(key(history, n));
  if (it == nodes_.end()) return 0.0;
  auto c = it->second.next.find(event);
  return c == it->second.next.end() ? 0.0 : c->second / it->second.total;
}

std::vector<std::vector<std::int32_t>> WittenBellNgram::contexts() const {
  std::vector<std::vector<std::int32_t>> out;
  out.reserve(nodes_.size());
  for (const auto& [k, node] : nodes_) out.push_back(unpack(k));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

void WittenBellNgram::write(std::ostream& out) const {
  out << "ngram order=" << order_ << " events=" << num_events_ << " symbols=" << num_symbols_
      << " contexts=" << nodes_.size() << '\n';
  for (const auto& ctx : contexts()) {
    const Node& node = nodes_.at(key(ctx, ctx.size()));
    if (ctx.empty()) {
      out << '-';
    } else {
      for (std::size_t i = 0; i < ctx.size(); ++i) out << (i ? " " : "") << ctx[i];
    }
    out << '\t' << format_double(node.total) << '\t';
    std::vector<std::pair<std::int32_t, double>> next(node.next.begin(), node.next.end());
    std::sort(next.begin(), next.end());
    for (std::size_t i = 0; i < next.size(); ++i) {
      out << (i ? " " : "") << next[i].first << ':' << format_double(next[i].second);
    }
    out << '\n';
  }
}

WittenBellNgram WittenBellNgram::read(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw Error(source + ": missing ngram section");
  int order = 0, events = 0, symbols = 0;
  std::size_t contexts = 0;
  if (std::sscanf(line.c_str(), "ngram order=%d events=%d symbols=%d contexts=%zu", &order, &events, &symbols,
                  &contexts) != 4) {
    throw Error(source + ": bad ngram header '" + line + "'");
  }
  WittenBellNgram lm(order, events, symbols);
  for (std::size_t i = 0; i < contexts; ++i) {
    if (!std::getline(in, line)) throw Error(source + ": truncated ngram section");
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos) throw Error(source + ": bad ngram line '" + line + "'");
    std::vector<std::int32_t> ctx;
    if (line.substr(0, t1) != "-") {
      std::istringstream ids(line.substr(0, t1));
      std::int32_t id;
      while (ids >> id) ctx.push_back(id);
    }
    Node node;
    node.total = std::stod(line.substr(t1 + 1, t2 - t1 - 1));
    std::istringstream pairs(line.substr(t2 + 1));
    std::string item;
    while (pairs >> item) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw Error(source + ": bad ngram count '" + item + "'");
      node.next[std::stoi(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
    }
    lm.nodes_[lm.key(ctx, ctx.size())] = std::move(node);
  }
  return lm;
}

bool WittenBellNgram::operator==(const WittenBellNgram& other) const {
  if (order_ != other.order_ || num_events_ != other.num_events_ || num_symbols_ != other.num_symbols_ ||
      nodes_.size() != other.nodes_.size()) {
    return false;
  }
  for (const auto& [k, node] : nodes_) {
    auto it = other.nodes_.find(k);
    if (it == other.nodes_.end() || it->second.total != node.total || it->second.next != node.next) return false;
  }
  return true;
}

}  // namespace lexloop
