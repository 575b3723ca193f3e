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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "redmask/align.hpp"
#include "redmask/io.hpp"

namespace redmask::mask {

enum class Method { PhoneMask, WordPieceMask, WordMask, SpecAugment };
enum class FillStrategy { UtteranceMean, WordMean };
// What a region was actually filled with (WordMean can fall back).
enum class FillKind { UtteranceMean, WordMean, Zero };

std::string_view method_name(Method m);
std::string_view fill_kind_name(FillKind k);
// Accepts pm, wpm, stm, specaugment. Throws UsageError otherwise.
Method parse_method(std::string_view name);
// Accepts utt, word. Throws UsageError otherwise.
FillStrategy parse_fill(std::string_view name);

struct SpecAugmentParams {
  int max_freq_width = 8;   // F
  int num_freq_masks = 2;   // mF
  int max_time_width = 40;  // Tmax
  int num_time_masks = 2;   // mT
};

struct MaskConfig {
  Method method = Method::PhoneMask;
  double ratio = 0.15;
  FillStrategy fill = FillStrategy::UtteranceMean;
  SpecAugmentParams spec;
  std::uint64_t seed = 0;

  // Throws UsageError on out-of-range values.
  void validate() const;
};

// Counter-based splitmix64 stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform on [0, bound); bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t uniform(std::uint64_t bound);
  // Uniform on {lo, ..., hi}.
  int uniform_int(int lo, int hi);

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64_mix(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view bytes);

// fnv1a64(utt_id) ^ global_seed, then one splitmix64 step.
std::uint64_t derive_utt_seed(std::uint64_t global_seed, std::string_view utt_id);

// round(ratio * n), at least 1 when ratio > 0 and n > 0.
std::size_t selection_count(double ratio, std::size_t n);

// First k entries of a seeded Fisher-Yates shuffle of [0, n).
std::vector<std::size_t> select_without_replacement(std::size_t n, std::size_t k,
                                                    SplitMix64& prng);

struct MaskRegion {
  int start_frame = 0;
  int end_frame = 0;
  int d0 = 0;
  int d1 = 0;
  std::vector<double> fill;
  FillKind fill_kind = FillKind::UtteranceMean;

  int num_frames() const noexcept { return end_frame - start_frame; }
  friend bool operator==(const MaskRegion&, const MaskRegion&) = default;
};

struct MaskPlan {
  std::string utt_id;
  std::vector<MaskRegion> regions;
  MaskConfig config;
  std::uint64_t seed = 0;
};

// The planners below leave region fills empty (compute_fill supplies them),
// except SpecAugment whose fill is zero. Segment regions are full band
// [0, dim) and clipped to [0, num_frames); segments with no frames inside the
// matrix are not eligible.
MaskPlan plan_phone_mask(const align::UttAlignment& alignment,
                         const MaskConfig& config, SplitMix64& prng,
                         int num_frames, int dim);
MaskPlan plan_word_mask(const align::UttAlignment& alignment,
                        const MaskConfig& config, SplitMix64& prng,
                        int num_frames, int dim);
MaskPlan plan_word_piece_mask(const align::UttAlignment& alignment,
                              const WordPieceVocab& vocab,
                              const MaskConfig& config, SplitMix64& prng,
                              int num_frames, int dim);
// Time masks first, then frequency masks. Widths may be zero.
MaskPlan plan_spec_augment(int num_frames, int dim, const MaskConfig& config,
                           SplitMix64& prng);

struct Fill {
  std::vector<double> values;
  FillKind kind;
};

// UtteranceMean: per-dim mean over all frames. WordMean: per-dim mean over
// the word span containing the region, falling back to the utterance mean
// when no word contains it.
Fill compute_fill(const FeatureMatrix& features, const MaskRegion& region,
                  FillStrategy strategy, const align::UttAlignment* alignment);

// Sets every region's fill (segment methods) from the unmasked features.
void resolve_fills(const FeatureMatrix& features, MaskPlan& plan,
                   const align::UttAlignment* alignment);

// Writes fills into a copy of the features; later regions win on overlap.
// Throws DataError on a region outside the matrix or a fill of the wrong
// width.
FeatureMatrix apply_mask(const FeatureMatrix& features, const MaskPlan& plan);

// Plan (with the utterance's derived seed), resolve fills. The alignment
// must already be validated; vocab is required for word-piece masking.
MaskPlan plan_utterance(const FeatureMatrix& features,
                        const align::UttAlignment* alignment,
                        const WordPieceVocab* vocab, const MaskConfig& config);

struct AugmentResult {
  FeatureArchive archive;
  std::vector<MaskPlan> plans;  // input order
};

// One masking draw per utterance. Output does not depend on `jobs`.
AugmentResult augment_corpus(const FeatureArchive& archive,
                             std::span<const align::UttAlignment> alignments,
                             const WordPieceVocab* vocab,
                             const MaskConfig& config, int jobs = 1);

// `utt_id method start_frame end_frame d0 d1 fill_kind`, tab separated,
// header first.
std::string format_plan_log(std::span<const MaskPlan> plans);

}  // namespace redmask::mask
