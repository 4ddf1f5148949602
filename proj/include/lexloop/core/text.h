// include/lexloop/core/text.h

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

#ifndef LEXLOOP_CORE_TEXT_H_
#define LEXLOOP_CORE_TEXT_H_

#include <string>
#include <string_view>
#include <vector>

namespace lexloop {

/// Splits a UTF-8 string into Unicode scalar values (one string each).
/// Throws lexloop::Error on invalid UTF-8.
std::vector<std::string> split_utf8(std::string_view text);

/// Splits on `sep`. Sets `*ok` to false if any field is empty, which is how
/// doubled, leading and trailing separators show up.
std::vector<std::string> split_fields(std::string_view text, char sep, bool* ok);

std::string join(const std::vector<std::string>& items, std::string_view sep = " ");

}  // namespace lexloop

#endif  // LEXLOOP_CORE_TEXT_H_
