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
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "redmask/align.hpp"
#include "redmask/error.hpp"

namespace redmask::align {
namespace {

// Round to nearest. Values within 1e-9 of a half snap upwards (0.005 s,
// 0.015 s).
long long round_frames(double seconds, double frame_shift_ms) {
  const double x = seconds * 1000.0 / frame_shift_ms;
  const double fl = std::floor(x);
  const double frac = x - fl;
  if (std::abs(frac - 0.5) < 1e-9) return static_cast<long long>(fl) + 1;
  return std::llround(x);
}

std::string describe(const PhoneSegment& p, std::size_t i) {
  return "segment " + std::to_string(i) + " ('" + p.phone + "' frames " +
         std::to_string(p.start_frame) + "-" + std::to_string(p.end_frame()) +
         ")";
}

}  // namespace

FrameSpan frames_from_seconds(double start_sec, double dur_sec,
                              double frame_shift_ms) {
  const long long start = round_frames(start_sec, frame_shift_ms);
  const long long end = round_frames(start_sec + dur_sec, frame_shift_ms);
  return {static_cast<int>(start),
          static_cast<int>(std::max<long long>(1, end - start))};
}

void validate_alignment(const UttAlignment& alignment, int num_feature_frames) {
  const auto& phones = alignment.phones;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    const PhoneSegment& p = phones[i];
    if (p.start_frame < 0 || p.num_frames < 1) {
      throw DataError(alignment.utt_id + ": invalid " + describe(p, i));
    }
    if (i > 0) {
      const PhoneSegment& prev = phones[i - 1];
      if (p.start_frame < prev.start_frame) {
        throw DataError(alignment.utt_id + ": unsorted " + describe(p, i));
      }
      if (p.start_frame < prev.end_frame()) {
        throw DataError(alignment.utt_id + ": overlapping " + describe(p, i));
      }
    }
  }
  if (!phones.empty()) {
    const int end = phones.back().end_frame();
    const int excess = end - num_feature_frames;
    if (excess > 2) {
      throw DataError(alignment.utt_id + ": alignment exceeds features by " +
                      std::to_string(excess) + " > 2 at " +
                      describe(phones.back(), phones.size() - 1));
    }
  }
}

std::vector<WordSegment> build_word_spans(std::span<const PhoneSegment> phones) {
  std::vector<WordSegment> words;
  std::unordered_set<int> closed;
  for (std::size_t i = 0; i < phones.size(); ++i) {
    const PhoneSegment& p = phones[i];
    if (!p.word_index) continue;
    const int w = *p.word_index;
    if (!words.empty() && words.back().word_index == w &&
        words.back().phone_end == i) {
      WordSegment& cur = words.back();
      cur.phone_end = i + 1;
      const int end = std::max(cur.end_frame(), p.end_frame());
      cur.start_frame = std::min(cur.start_frame, p.start_frame);
      cur.num_frames = end - cur.start_frame;
      continue;
    }
    if (closed.contains(w)) {
      throw DataError("word " + std::to_string(w) +
                      " split by other material at phone " + std::to_string(i));
    }
    closed.insert(w);
    words.push_back({w, i, i + 1, p.start_frame, p.num_frames});
  }
  return words;
}

UttAlignment make_alignment(std::string utt_id, std::vector<PhoneSegment> phones,
                            double frame_shift_ms) {
  UttAlignment a;
  a.utt_id = std::move(utt_id);
  a.frame_shift_ms = frame_shift_ms;
  a.phones = std::move(phones);
  for (PhoneSegment& p : a.phones) {
    if (p.dur_sec == 0.0) {
      p.start_sec = p.start_frame * frame_shift_ms / 1000.0;
      p.dur_sec = p.num_frames * frame_shift_ms / 1000.0;
    }
  }
  a.words = build_word_spans(a.phones);
  return a;
}

DurationStats duration_stats(std::span<const UttAlignment> alignments,
                             double frame_shift_ms) {
  struct Acc {
    std::size_t count = 0;
    long long frames = 0;
    int min_frames = std::numeric_limits<int>::max();
    int max_frames = 0;
    void add(int n) {
      ++count;
      frames += n;
      min_frames = std::min(min_frames, n);
      max_frames = std::max(max_frames, n);
    }
  };

  // Integer frame sums, one division per mean.
  auto to_sec = [&](long long frames, std::size_t count) {
    return static_cast<double>(frames) * frame_shift_ms /
           (1000.0 * static_cast<double>(count));
  };

  std::map<std::string, Acc> per_phone;
  Acc overall;
  std::size_t short_phones = 0;
  for (const UttAlignment& utt : alignments) {
    for (const PhoneSegment& p : utt.phones) {
      if (p.is_silence()) continue;
      per_phone[p.phone].add(p.num_frames);
      overall.add(p.num_frames);
      if (p.num_frames == 3) ++short_phones;
    }
  }
  if (overall.count == 0) {
    throw DataError("duration stats: no non-silence phones");
  }

  DurationStats stats;
  stats.frame_shift_ms = frame_shift_ms;
  for (const auto& [phone, acc] : per_phone) {
    stats.per_phone[phone] = {acc.count, to_sec(acc.frames, acc.count),
                              to_sec(acc.min_frames, 1),
                              to_sec(acc.max_frames, 1)};
  }
  stats.total_count = overall.count;
  stats.overall_mean_sec = to_sec(overall.frames, overall.count);
  stats.overall_min_sec = to_sec(overall.min_frames, 1);
  stats.overall_max_sec = to_sec(overall.max_frames, 1);
  stats.short_phone_ratio =
      static_cast<double>(short_phones) / static_cast<double>(overall.count);
  return stats;
}

}  // namespace redmask::align
