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

#include <algorithm>
#include <numeric>
#include <string>

#include "redmask/error.hpp"
#include "redmask/tokenize.hpp"

namespace redmask::tokenize {

std::vector<Piece> segment_word_pieces(std::string_view word,
                                       const WordPieceVocab& vocab) {
  if (word.empty()) return {};
  const std::vector<std::string> units = graphemes(word);
  std::vector<Piece> pieces;
  std::size_t i = 0;
  while (i < units.size()) {
    // Longest candidate first; stop growing once past the longest piece.
    std::size_t end = i;
    std::size_t bytes = 0;
    while (end < units.size() && bytes + units[end].size() <= vocab.max_piece_bytes()) {
      bytes += units[end].size();
      ++end;
    }
    bool matched = false;
    for (std::size_t j = end; j > i; --j) {
      std::string candidate;
      for (std::size_t k = i; k < j; ++k) candidate += units[k];
      if (vocab.contains(candidate)) {
        pieces.push_back({std::move(candidate), static_cast<int>(j - i), false});
        i = j;
        matched = true;
        break;
      }
    }
    if (!matched) {
      pieces.push_back({units[i], 1, true});
      ++i;
    }
  }
  return pieces;
}

std::vector<int> largest_remainder(int total, std::span<const int> weights) {
  const long long sum = std::accumulate(weights.begin(), weights.end(), 0LL);
  std::vector<int> parts(weights.size(), 0);
  if (weights.empty() || sum <= 0) return parts;
  // Exact integer quotas: part_k = floor(total*w_k/sum), remainder r_k.
  std::vector<long long> rem(weights.size());
  long long assigned = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    const long long num = static_cast<long long>(total) * weights[k];
    parts[k] = static_cast<int>(num / sum);
    rem[k] = num % sum;
    assigned += parts[k];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (long long left = total - assigned, k = 0; left > 0; --left, ++k) {
    ++parts[order[static_cast<std::size_t>(k)]];
  }
  return parts;
}

std::vector<PieceSpan> piece_frame_spans(
    const align::WordSegment& word,
    std::span<const align::PhoneSegment> phones_of_word,
    std::span<const Piece> pieces) {
  if (phones_of_word.empty()) throw DataError("piece spans: word has no phones");
  if (pieces.empty()) throw DataError("piece spans: no pieces");
  int total_graphemes = 0;
  for (const Piece& p : pieces) {
    if (p.num_graphemes < 1) throw DataError("piece spans: empty piece");
    total_graphemes += p.num_graphemes;
  }

  std::vector<PieceSpan> spans;
  spans.reserve(pieces.size());
  if (static_cast<std::size_t>(total_graphemes) == phones_of_word.size()) {
    // One grapheme per phone. A piece runs from its first phone's start to
    // the next piece's first phone, so gaps between phones stay covered.
    std::size_t phone = 0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const std::size_t next = phone + static_cast<std::size_t>(pieces[k].num_graphemes);
      const int start = k == 0 ? word.start_frame : phones_of_word[phone].start_frame;
      const int end = next == phones_of_word.size()
                          ? word.end_frame()
                          : phones_of_word[next].start_frame;
      spans.push_back({pieces[k].text, phone, next, start, end - start});
      phone = next;
    }
    return spans;
  }

  std::vector<int> weights;
  for (const Piece& p : pieces) weights.push_back(p.num_graphemes);
  const std::vector<int> frames = largest_remainder(word.num_frames, weights);
  int start = word.start_frame;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    spans.push_back({pieces[k].text, 0, 0, start, frames[k]});
    start += frames[k];
  }
  return spans;
}

std::vector<PieceSpan> piece_frame_spans(
    const align::WordSegment& word,
    std::span<const align::PhoneSegment> phones_of_word,
    std::span<const Piece> pieces, std::string_view word_text) {
  std::string joined;
  for (const Piece& p : pieces) joined += p.text;
  if (joined != word_text) {
    throw DataError("piece spans: pieces '" + joined + "' do not spell '" +
                    std::string(word_text) + "'");
  }
  return piece_frame_spans(word, phones_of_word, pieces);
}

}  // namespace redmask::tokenize

namespace redmask::tokenize {

std::string spell_word(std::span<const align::PhoneSegment> phones_of_word) {
  std::string text;
  for (const auto& p : phones_of_word) {
    std::string_view label = p.phone;
    if (label.size() > 2 && label[label.size() - 2] == '_') {
      const char pos = label.back();
      if (pos == 'B' || pos == 'I' || pos == 'E' || pos == 'S') {
        label.remove_suffix(2);
      }
    }
    text += label;
  }
  return text;
}

}  // namespace redmask::tokenize
