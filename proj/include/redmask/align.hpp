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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace redmask::align {

// One aligned phone. word_index is empty exactly for silence/non-speech.
struct PhoneSegment {
  std::string phone;
  int start_frame = 0;
  int num_frames = 1;
  std::optional<int> word_index;
  // Source times in seconds; kept so the segment can be re-quantized after
  // speed perturbation.
  double start_sec = 0.0;
  double dur_sec = 0.0;

  bool is_silence() const noexcept { return !word_index.has_value(); }
  int end_frame() const noexcept { return start_frame + num_frames; }

  friend bool operator==(const PhoneSegment&, const PhoneSegment&) = default;
};

struct WordSegment {
  int word_index = 0;
  // [phone_begin, phone_end) into UttAlignment::phones.
  std::size_t phone_begin = 0;
  std::size_t phone_end = 0;
  int start_frame = 0;
  int num_frames = 0;

  int end_frame() const noexcept { return start_frame + num_frames; }

  friend bool operator==(const WordSegment&, const WordSegment&) = default;
};

struct UttAlignment {
  std::string utt_id;
  double frame_shift_ms = 10.0;
  std::vector<PhoneSegment> phones;
  std::vector<WordSegment> words;

  friend bool operator==(const UttAlignment&, const UttAlignment&) = default;
};

struct FrameSpan {
  int start_frame = 0;
  int num_frames = 1;
  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

// Quantization policy shared by every reader: boundaries rounded to the
// nearest frame, with a one-frame floor on the length.
FrameSpan frames_from_seconds(double start_sec, double dur_sec,
                              double frame_shift_ms);

// Throws DataError naming the first offending segment. The last phone may
// end up to two frames past the feature matrix.
void validate_alignment(const UttAlignment& alignment, int num_feature_frames);

// One WordSegment per distinct word index. Throws DataError when a word's
// phones are not one contiguous run.
std::vector<WordSegment> build_word_spans(std::span<const PhoneSegment> phones);

// Builds an alignment from phones and derives its word spans.
UttAlignment make_alignment(std::string utt_id, std::vector<PhoneSegment> phones,
                            double frame_shift_ms = 10.0);

struct PhoneDurations {
  std::size_t count = 0;
  double mean_sec = 0.0;
  double min_sec = 0.0;
  double max_sec = 0.0;
};

struct DurationStats {
  std::map<std::string, PhoneDurations> per_phone;
  std::size_t total_count = 0;
  double overall_mean_sec = 0.0;
  double overall_min_sec = 0.0;
  double overall_max_sec = 0.0;
  // Fraction of speech phones lasting exactly three frames, the minimum a
  // three-state HMM aligner can emit.
  double short_phone_ratio = 0.0;
  double frame_shift_ms = 10.0;
};

// Silence is excluded throughout. Throws DataError when there is no speech
// phone at all.
DurationStats duration_stats(std::span<const UttAlignment> alignments,
                             double frame_shift_ms);

}  // namespace redmask::align
