// Copyright 2026 The redmask Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <utility>

#include "redmask/error.hpp"
#include "redmask/tokenize.hpp"

namespace redmask::tokenize {
namespace {

// Combining marks: generic blocks plus Latin, Cyrillic, Arabic, Hebrew and
// Indic ranges.
constexpr std::array<std::pair<char32_t, char32_t>, 32> kCombining{{
    {0x0300, 0x036F}, {0x0483, 0x0489}, {0x0591, 0x05BD}, {0x05BF, 0x05BF},
    {0x05C1, 0x05C2}, {0x05C4, 0x05C5}, {0x05C7, 0x05C7}, {0x0610, 0x061A},
    {0x064B, 0x065F}, {0x0670, 0x0670}, {0x06D6, 0x06DC}, {0x06DF, 0x06E4},
    {0x06E7, 0x06E8}, {0x06EA, 0x06ED}, {0x0900, 0x0903}, {0x093A, 0x093C},
    {0x093E, 0x094F}, {0x0951, 0x0957}, {0x0962, 0x0963}, {0x1AB0, 0x1AFF},
    {0x1DC0, 0x1DFF}, {0x200C, 0x200D}, {0x20D0, 0x20FF}, {0x302A, 0x302F},
    {0x3099, 0x309A}, {0xFE00, 0xFE0F}, {0xFE20, 0xFE2F}, {0x0E31, 0x0E31},
    {0x0E34, 0x0E3A}, {0x0E47, 0x0E4E}, {0xE0100, 0xE01EF}, {0x1F3FB, 0x1F3FF},
}};

// Decodes one scalar value starting at s[i]; advances i.
char32_t decode(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  int len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    len = 1;
    cp = b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    throw DataError("graphemes: invalid UTF-8 lead byte at offset " +
                    std::to_string(i));
  }
  if (i + len > s.size()) {
    throw DataError("graphemes: truncated UTF-8 sequence at offset " +
                    std::to_string(i));
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      throw DataError("graphemes: invalid UTF-8 continuation at offset " +
                      std::to_string(i + k));
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    throw DataError("graphemes: invalid code point at offset " +
                    std::to_string(i));
  }
  i += len;
  return cp;
}

}  // namespace

bool is_combining_mark(char32_t cp) {
  for (const auto& [lo, hi] : kCombining) {
    if (cp >= lo && cp <= hi) return true;
  }
  return false;
}

std::vector<std::string> graphemes(std::string_view word) {
  if (word.empty()) throw DataError("graphemes: empty word");
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < word.size()) {
    const std::size_t begin = i;
    const char32_t cp = decode(word, i);
    if (is_combining_mark(cp) && !out.empty()) {
      out.back().append(word.substr(begin, i - begin));
    } else {
      out.emplace_back(word.substr(begin, i - begin));
    }
  }
  return out;
}

}  // namespace redmask::tokenize
