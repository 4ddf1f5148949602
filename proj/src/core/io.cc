// src/core/io.cc

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

#include "lexloop/core/io.h"

#include <fstream>
#include <sstream>

#include "lexloop/core/error.h"
#include "lexloop/core/symbol_table.h"
#include "lexloop/core/text.h"

namespace lexloop {
namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  return in;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

Pronunciation parse_symbols(std::string_view field, const std::string& source, std::size_t line_no,
                            const char* what) {
  bool ok = true;
  auto symbols = split_fields(field, ' ', &ok);
  if (!ok) throw ParseError(source, line_no, std::string("empty ") + what + " symbol (stray space)");
  for (const auto& s : symbols) {
    if (!is_valid_symbol(s)) throw ParseError(source, line_no, std::string("invalid ") + what + " '" + s + "'");
  }
  return symbols;
}

}  // namespace

Lexicon parse_lexicon(std::istream& in, const std::string& source) {
  Lexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, line_no, "missing TAB between word and pronunciation");
    const std::string word = line.substr(0, tab);
    if (!is_valid_symbol(word)) throw ParseError(source, line_no, "invalid word '" + word + "'");
    std::string rest = line.substr(tab + 1);
    std::string meta;
    if (const auto tab2 = rest.find('\t'); tab2 != std::string::npos) {
      meta = rest.substr(tab2 + 1);
      rest.resize(tab2);
    }
    if (rest.empty()) throw ParseError(source, line_no, "empty pronunciation for '" + word + "'");
    LexiconEntry entry;
    entry.pron = parse_symbols(rest, source, line_no, "phoneme");
    if (!meta.empty()) {
      const auto colon = meta.find(':');
      if (colon == std::string::npos) throw ParseError(source, line_no, "expected provenance:count");
      auto prov = provenance_from_string(meta.substr(0, colon));
      if (!prov) throw ParseError(source, line_no, "unknown provenance '" + meta.substr(0, colon) + "'");
      entry.provenance = *prov;
      try {
        std::size_t used = 0;
        const std::string count_text = meta.substr(colon + 1);
        entry.count = std::stoll(count_text, &used);
        if (used != count_text.size() || entry.count < 0) throw std::invalid_argument(count_text);
      } catch (const std::exception&) {
        throw ParseError(source, line_no, "bad count in '" + meta + "'");
      }
    }
    if (!lex.add(word, std::move(entry))) {
      throw ParseError(source, line_no, "duplicate entry for '" + word + "'");
    }
  }
  return lex;
}

Lexicon read_lexicon(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_lexicon(in, path.string());
}

void write_lexicon(const Lexicon& lex, std::ostream& out) {
  for (const auto& [word, variants] : lex.entries()) {
    for (const auto& e : variants) {
      if (e.pron.empty()) throw Error("refusing to write empty pronunciation for '" + word + "'");
      out << word << '\t' << join(e.pron);
      if (e.provenance != Provenance::kSeed || e.count != 0) {
        out << '\t' << to_string(e.provenance) << ':' << e.count;
      }
      out << '\n';
    }
  }
}

void write_lexicon(const Lexicon& lex, const std::filesystem::path& path) {
  std::ostringstream out;
  write_lexicon(lex, out);
  write_file_atomic(path, out.str());
}

Corpus parse_corpus(std::istream& in, const std::string& source) {
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (!have_header) {
      if (line.empty()) continue;
      if (line.rfind("#lang=", 0) != 0) throw ParseError(source, line_no, "expected '#lang=<tag>' header");
      corpus.language_tag = line.substr(6);
      if (!is_valid_symbol(corpus.language_tag)) throw ParseError(source, line_no, "invalid language tag");
      have_header = true;
      continue;
    }
    if (line.empty() || line[0] == '#') continue;
    Sentence s;
    std::string text = line;
    if (const auto tab = line.find('\t'); tab != std::string::npos) {
      text = line.substr(0, tab);
      const std::string phones = line.substr(tab + 1);
      s.phones = phones.empty() ? Pronunciation{} : parse_symbols(phones, source, line_no, "phoneme");
    }
    bool ok = true;
    s.words = split_fields(text, ' ', &ok);
    if (!ok) throw ParseError(source, line_no, "empty word field");
    corpus.sentences.push_back(std::move(s));
  }
  if (!have_header) throw ParseError(source, line_no, "missing '#lang=<tag>' header");
  return corpus;
}

Corpus read_corpus(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_corpus(in, path.string());
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
  out << "#lang=" << corpus.language_tag << '\n';
  for (const auto& s : corpus.sentences) {
    if (s.words.empty()) throw Error("refusing to write empty sentence");
    out << join(s.words);
    if (s.phones) out << '\t' << join(*s.phones);
    out << '\n';
  }
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ostringstream out;
  write_corpus(corpus, out);
  write_file_atomic(path, out.str());
}

std::string read_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    if (!out.flush()) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace lexloop
