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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "redmask/align.hpp"
#include "redmask/matrix.hpp"

namespace redmask {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;
};

// T x D features for one utterance.
struct FeatureMatrix {
  std::string utt_id;
  Matrix data;
  double frame_shift_ms = 10.0;
  double frame_length_ms = 25.0;

  std::size_t num_frames() const noexcept { return data.rows(); }
  std::size_t dim() const noexcept { return data.cols(); }
};

// Utterances in insertion order with unique ids.
class FeatureArchive {
 public:
  // Throws DataError on a duplicate or malformed utt_id.
  void add(FeatureMatrix features);

  const FeatureMatrix* find(std::string_view utt_id) const;
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  const FeatureMatrix& operator[](std::size_t i) const { return entries_[i]; }

 private:
  std::vector<FeatureMatrix> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

class WordPieceVocab {
 public:
  WordPieceVocab() = default;
  // Throws DataError on empty or duplicate pieces.
  explicit WordPieceVocab(std::span<const std::string> pieces);

  bool contains(std::string_view piece) const {
    return pieces_.contains(std::string(piece));
  }
  std::size_t size() const noexcept { return pieces_.size(); }
  bool empty() const noexcept { return pieces_.empty(); }
  // Longest piece measured in bytes; bounds the greedy matcher.
  std::size_t max_piece_bytes() const noexcept { return max_bytes_; }

 private:
  std::unordered_set<std::string> pieces_;
  std::size_t max_bytes_ = 0;
};

namespace io {

// 16-bit PCM mono RIFF/WAVE. Samples are scaled by 1/32768.
Waveform read_wav(const std::filesystem::path& path);
Waveform parse_wav(std::span<const std::uint8_t> bytes);
// Samples are clamped to [-1, 1) and rounded to the nearest int16.
void write_wav(const Waveform& wave, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_wav(const Waveform& wave);

// Text archive, one frame per row, 17 significant digits:
//   utt_id  [
//     v v v
//     v v v ]
void write_feature_archive(const FeatureArchive& archive, std::ostream& out);
void write_feature_archive(const FeatureArchive& archive,
                           const std::filesystem::path& path);
FeatureArchive read_feature_archive(std::istream& in);
FeatureArchive read_feature_archive(const std::filesystem::path& path);

// `utt_id channel start_sec dur_sec phone [word_index|-]` per line; '#'
// starts a comment line. Utterances come back in order of first appearance.
std::vector<align::UttAlignment> read_ctm(std::istream& in,
                                          double frame_shift_ms = 10.0);
std::vector<align::UttAlignment> read_ctm(const std::filesystem::path& path,
                                          double frame_shift_ms = 10.0);
void write_ctm(std::span<const align::UttAlignment> alignments,
               std::ostream& out);

WordPieceVocab read_vocab(std::istream& in);
WordPieceVocab read_vocab(const std::filesystem::path& path);

// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace io
}  // namespace redmask
