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

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redmask/align.hpp"
#include "redmask/io.hpp"

namespace redmask::tokenize {

// Splits UTF-8 into Unicode scalar values, attaching combining marks to the
// preceding base character. Throws DataError on empty input or invalid
// UTF-8.
std::vector<std::string> graphemes(std::string_view word);

// True for code points treated as combining marks.
bool is_combining_mark(char32_t cp);

struct Piece {
  std::string text;
  int num_graphemes = 1;
  bool unknown = false;

  friend bool operator==(const Piece&, const Piece&) = default;
};

// Greedy longest match over graphemes, left to right. Unmatchable graphemes
// become single-grapheme pieces flagged unknown.
std::vector<Piece> segment_word_pieces(std::string_view word,
                                       const WordPieceVocab& vocab);

struct PieceSpan {
  std::string piece;
  // [phone_begin, phone_end) relative to the word's phones; empty when the
  // span came from proportional allocation.
  std::size_t phone_begin = 0;
  std::size_t phone_end = 0;
  int start_frame = 0;
  int num_frames = 0;

  int end_frame() const noexcept { return start_frame + num_frames; }
};

// Time spans of the pieces of one word. With one grapheme per phone, each
// piece takes its phones' frames; otherwise the word's frames are split in
// proportion to grapheme counts with largest-remainder rounding. The spans
// always partition the word's frames. Throws DataError if pieces carry no
// graphemes or phones_of_word is empty.
std::vector<PieceSpan> piece_frame_spans(
    const align::WordSegment& word,
    std::span<const align::PhoneSegment> phones_of_word,
    std::span<const Piece> pieces);

// Same, but checks first that the pieces spell `word_text`.
std::vector<PieceSpan> piece_frame_spans(
    const align::WordSegment& word,
    std::span<const align::PhoneSegment> phones_of_word,
    std::span<const Piece> pieces, std::string_view word_text);

// Spelling of a word from its phone labels (one grapheme per phone), with
// Kaldi word-position suffixes (_B, _I, _E, _S) removed.
std::string spell_word(std::span<const align::PhoneSegment> phones_of_word);

// Largest-remainder split of `total` into parts proportional to `weights`.
// Ties go to the earlier part.
std::vector<int> largest_remainder(int total, std::span<const int> weights);

}  // namespace redmask::tokenize
