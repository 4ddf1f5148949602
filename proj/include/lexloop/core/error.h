// include/lexloop/core/error.h

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

#ifndef LEXLOOP_CORE_ERROR_H_
#define LEXLOOP_CORE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lexloop {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A word contains a grapheme the model has never seen.
class OovError : public Error {
 public:
  explicit OovError(const std::string& grapheme)
      : Error("unknown grapheme '" + grapheme + "'"), grapheme_(grapheme) {}

  const std::string& grapheme() const { return grapheme_; }

 private:
  std::string grapheme_;
};

/// No HMM path can emit the observed phoneme sequence.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

}  // namespace lexloop

#endif  // LEXLOOP_CORE_ERROR_H_
