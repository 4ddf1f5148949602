// include/lexloop/core/io.h

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

#ifndef LEXLOOP_CORE_IO_H_
#define LEXLOOP_CORE_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "lexloop/core/types.h"

namespace lexloop {

// Lexicon file: one `word<TAB>ph ph ph[<TAB>provenance:count]` per line.
// Blank lines and lines starting with '#' are ignored. The third field is
// written only when it differs from `seed:0`.
Lexicon read_lexicon(const std::filesystem::path& path);
Lexicon parse_lexicon(std::istream& in, const std::string& source = "<stream>");
void write_lexicon(const Lexicon& lex, const std::filesystem::path& path);
void write_lexicon(const Lexicon& lex, std::ostream& out);

// Corpus file: header `#lang=<tag>`, then `w1 w2 ...[<TAB>p1 p2 ...]`.
Corpus read_corpus(const std::filesystem::path& path);
Corpus parse_corpus(std::istream& in, const std::string& source = "<stream>");
void write_corpus(const Corpus& corpus, const std::filesystem::path& path);
void write_corpus(const Corpus& corpus, std::ostream& out);

/// Reads a whole file; throws lexloop::Error if it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to `path` via a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace lexloop

#endif  // LEXLOOP_CORE_IO_H_
