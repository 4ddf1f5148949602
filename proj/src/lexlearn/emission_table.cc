// src/lexlearn/emission_table.cc

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

#include "lexloop/lexlearn/emission_table.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lexloop/core/error.h"
#include "lexloop/core/io.h"

namespace lexloop::lexlearn {

EmissionTable init_emissions(const std::vector<std::string>& graphemes, const std::vector<std::string>& phonemes) {
  if (graphemes.empty()) throw Error("init_emissions: empty grapheme inventory");
  if (phonemes.empty()) throw Error("init_emissions: empty phoneme inventory");
  EmissionTable table;
  for (const auto& g : std::set<std::string>(graphemes.begin(), graphemes.end())) table.graphemes_.intern(g);
  for (const auto& p : std::set<std::string>(phonemes.begin(), phonemes.end())) table.phonemes_.intern(p);
  table.data_.assign(table.num_graphemes() * table.num_phonemes(), 1.0 / static_cast<double>(table.num_phonemes()));
  return table;
}

std::vector<double> floored_ml_distribution(std::span<const double> counts, double floor) {
  const std::size_t n = counts.size();
  if (floor * static_cast<double>(n) > 1.0) throw Error("emission floor too large for inventory");
  std::vector<bool> pinned(n, false);
  std::vector<double> p(n, floor);
  while (true) {
    double free_mass = 1.0;
    double free_count = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        free_mass -= floor;
      } else {
        free_count += counts[i];
      }
    }
    if (free_count <= 0.0) {
      // Only zero counts left: spread the remainder evenly.
      std::size_t free = 0;
      for (std::size_t i = 0; i < n; ++i) free += !pinned[i];
      for (std::size_t i = 0; i < n; ++i) {
        p[i] = pinned[i] ? floor : free_mass / static_cast<double>(free);
      }
      return p;
    }
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) continue;
      p[i] = free_mass * counts[i] / free_count;
      if (p[i] < floor) {
        pinned[i] = true;
        changed = true;
      }
    }
    if (!changed) return p;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) p[i] = floor;
    }
  }
}

double EmissionTable::prob(const std::string& g, const std::string& p) const {
  auto gi = graphemes_.find(g);
  auto pi = phonemes_.find(p);
  if (!gi || !pi) throw Error("emission lookup for unknown symbol '" + g + "'/'" + p + "'");
  return prob(*gi, *pi);
}

void EmissionTable::set_row(SymbolId g, std::span<const double> row) {
  if (row.size() != num_phonemes()) throw Error("emission row has wrong length");
  double sum = 0;
  for (double v : row) {
    if (!(v >= kFloor)) throw Error("emission entry below floor");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("emission row does not sum to 1");
  std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(g * num_phonemes()));
}

void EmissionTable::reestimate_row(SymbolId g, std::span<const double> counts) {
  double total = 0;
  for (double c : counts) total += c;
  if (!(total > 0)) return;
  const auto row = floored_ml_distribution(counts, kFloor);
  std::copy(row.begin(), row.end(), data_.begin() + static_cast<std::ptrdiff_t>(g * num_phonemes()));
}

void EmissionTable::save(std::ostream& out) const {
  out << "#emissions v1\n";
  out << "phonemes";
  for (const auto& p : phonemes_.texts()) out << '\t' << p;
  out << '\n';
  char buf[32];
  for (SymbolId g = 0; g < static_cast<SymbolId>(num_graphemes()); ++g) {
    out << graphemes_.text(g);
    for (double v : row(g)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

void EmissionTable::save(const std::filesystem::path& path) const {
  std::ostringstream out;
  save(out);
  write_file_atomic(path, out.str());
}

EmissionTable EmissionTable::load(std::istream& in, const std::string& source) {
  EmissionTable table;
  std::string line;
  if (!std::getline(in, line) || line != "#emissions v1") throw Error(source + ": not an '#emissions v1' file");
  if (!std::getline(in, line)) throw Error(source + ": missing phoneme header");
  {
    std::istringstream head(line);
    std::string field;
    std::getline(head, field, '\t');
    if (field != "phonemes") throw Error(source + ": missing phoneme header");
    while (std::getline(head, field, '\t')) table.phonemes_.intern(field);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::getline(row, field, '\t');
    table.graphemes_.intern(field);
    std::size_t n = 0;
    while (std::getline(row, field, '\t')) {
      table.data_.push_back(std::stod(field));
      ++n;
    }
    if (n != table.num_phonemes()) throw Error(source + ": emission row for '" + table.graphemes_.texts().back() + "' has wrong length");
  }
  return table;
}

EmissionTable EmissionTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return load(in, path.string());
}

}  // namespace lexloop::lexlearn
