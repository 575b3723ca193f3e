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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "redmask/error.hpp"
#include "redmask/io.hpp"

namespace redmask::io {
namespace {

// Five-column (word-less) CTMs mark non-speech only through these labels.
bool is_silence_label(std::string_view phone) {
  return phone == "SIL" || phone == "sil" || phone == "SPN" || phone == "spn" ||
         phone == "NSN" || phone == "nsn" || phone == "sp" || phone == "<sil>";
}

double parse_seconds(std::string_view tok, const char* field, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw FormatError("ctm: unparseable " + std::string(field) + " '" +
                          std::string(tok) + "'",
                      line);
  }
  return v;
}

int parse_word_index(std::string_view tok, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) {
    throw FormatError("ctm: bad word_index '" + std::string(tok) + "'", line);
  }
  return v;
}

struct UttState {
  align::UttAlignment alignment;
  std::optional<int> last_word;
  std::unordered_map<int, bool> seen_words;
  int next_implicit_word = 0;
};

}  // namespace

std::vector<align::UttAlignment> read_ctm(std::istream& in,
                                          double frame_shift_ms) {
  std::vector<UttState> utts;
  std::unordered_map<std::string, std::size_t> index;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<std::string> cols;
    for (std::string tok; fields >> tok;) cols.push_back(std::move(tok));
    if (cols.empty() || cols[0][0] == '#') continue;
    if (cols.size() != 5 && cols.size() != 6) {
      throw FormatError("ctm: expected 5 or 6 columns, got " +
                            std::to_string(cols.size()),
                        line_no);
    }

    const double start = parse_seconds(cols[2], "start", line_no);
    const double dur = parse_seconds(cols[3], "duration", line_no);
    if (start < 0) throw FormatError("ctm: negative start", line_no);
    if (dur < 0) throw FormatError("ctm: negative duration", line_no);
    if (dur == 0) throw FormatError("ctm: zero duration", line_no);

    auto [it, inserted] = index.try_emplace(cols[0], utts.size());
    if (inserted) {
      utts.emplace_back();
      utts.back().alignment.utt_id = cols[0];
      utts.back().alignment.frame_shift_ms = frame_shift_ms;
    }
    UttState& st = utts[it->second];
    auto& phones = st.alignment.phones;
    if (!phones.empty() && start <= phones.back().start_sec) {
      throw FormatError("ctm: non-monotonic start within '" + cols[0] + "'",
                        line_no);
    }

    align::PhoneSegment seg;
    seg.phone = cols[4];
    seg.start_sec = start;
    seg.dur_sec = dur;
    const auto span = align::frames_from_seconds(start, dur, frame_shift_ms);
    seg.start_frame = span.start_frame;
    seg.num_frames = span.num_frames;

    if (cols.size() == 6) {
      if (cols[5] != "-") seg.word_index = parse_word_index(cols[5], line_no);
    } else if (!is_silence_label(seg.phone)) {
      // Without a word column every speech phone is its own word.
      seg.word_index = st.next_implicit_word;
    }

    if (seg.word_index) {
      const int w = *seg.word_index;
      if (st.seen_words.contains(w) && st.last_word != w) {
        throw FormatError("ctm: word " + std::to_string(w) +
                              " split by other material in '" + cols[0] + "'",
                          line_no);
      }
      st.seen_words[w] = true;
      st.next_implicit_word = std::max(st.next_implicit_word, w + 1);
    }
    st.last_word = seg.word_index;
    phones.push_back(std::move(seg));
  }

  std::vector<align::UttAlignment> out;
  out.reserve(utts.size());
  for (UttState& st : utts) {
    st.alignment.words = align::build_word_spans(st.alignment.phones);
    out.push_back(std::move(st.alignment));
  }
  return out;
}

std::vector<align::UttAlignment> read_ctm(const std::filesystem::path& path,
                                          double frame_shift_ms) {
  std::ifstream in(path);
  if (!in) throw FormatError("ctm: cannot open " + path.string());
  try {
    return read_ctm(in, frame_shift_ms);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_ctm(std::span<const align::UttAlignment> alignments,
               std::ostream& out) {
  char buf[64];
  for (const auto& utt : alignments) {
    for (const auto& p : utt.phones) {
      std::snprintf(buf, sizeof(buf), " 1 %.17g %.17g ", p.start_sec, p.dur_sec);
      out << utt.utt_id << buf << p.phone << ' ';
      if (p.word_index) {
        out << *p.word_index;
      } else {
        out << '-';
      }
      out << '\n';
    }
  }
}

}  // namespace redmask::io
