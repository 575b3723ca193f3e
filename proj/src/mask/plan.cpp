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
#include <string>

#include "redmask/error.hpp"
#include "redmask/mask.hpp"
#include "redmask/tokenize.hpp"

namespace redmask::mask {
namespace {

struct Span {
  int start;
  int end;
};

// Clips to [0, num_frames); false when nothing is left.
bool clip(Span& s, int num_frames) {
  if (num_frames >= 0) s.end = std::min(s.end, num_frames);
  return s.end > s.start;
}

MaskPlan select_spans(const std::string& utt_id, std::vector<Span> pool,
                      const MaskConfig& config, SplitMix64& prng, int dim) {
  MaskPlan plan;
  plan.utt_id = utt_id;
  plan.config = config;
  const std::size_t k = selection_count(config.ratio, pool.size());
  for (std::size_t i : select_without_replacement(pool.size(), k, prng)) {
    MaskRegion r;
    r.start_frame = pool[i].start;
    r.end_frame = pool[i].end;
    r.d0 = 0;
    r.d1 = dim;
    r.fill_kind = config.fill == FillStrategy::WordMean ? FillKind::WordMean
                                                        : FillKind::UtteranceMean;
    plan.regions.push_back(std::move(r));
  }
  return plan;
}

}  // namespace

MaskPlan plan_phone_mask(const align::UttAlignment& alignment,
                         const MaskConfig& config, SplitMix64& prng,
                         int num_frames, int dim) {
  std::vector<Span> pool;
  for (const auto& p : alignment.phones) {
    if (p.is_silence()) continue;
    Span s{p.start_frame, p.end_frame()};
    if (clip(s, num_frames)) pool.push_back(s);
  }
  return select_spans(alignment.utt_id, std::move(pool), config, prng, dim);
}

MaskPlan plan_word_mask(const align::UttAlignment& alignment,
                        const MaskConfig& config, SplitMix64& prng,
                        int num_frames, int dim) {
  std::vector<Span> pool;
  for (const auto& w : alignment.words) {
    Span s{w.start_frame, w.end_frame()};
    if (clip(s, num_frames)) pool.push_back(s);
  }
  return select_spans(alignment.utt_id, std::move(pool), config, prng, dim);
}

MaskPlan plan_word_piece_mask(const align::UttAlignment& alignment,
                              const WordPieceVocab& vocab,
                              const MaskConfig& config, SplitMix64& prng,
                              int num_frames, int dim) {
  std::vector<Span> pool;
  for (const auto& w : alignment.words) {
    const std::span<const align::PhoneSegment> phones(
        alignment.phones.data() + w.phone_begin, w.phone_end - w.phone_begin);
    const std::string text = tokenize::spell_word(phones);
    const auto pieces = tokenize::segment_word_pieces(text, vocab);
    for (const auto& ps : tokenize::piece_frame_spans(w, phones, pieces)) {
      Span s{ps.start_frame, ps.end_frame()};
      if (clip(s, num_frames)) pool.push_back(s);
    }
  }
  return select_spans(alignment.utt_id, std::move(pool), config, prng, dim);
}

MaskPlan plan_spec_augment(int num_frames, int dim, const MaskConfig& config,
                           SplitMix64& prng) {
  MaskPlan plan;
  plan.config = config;
  if (num_frames <= 0) return plan;
  const SpecAugmentParams& sp = config.spec;
  if (sp.num_freq_masks > 0 && sp.max_freq_width >= dim) {
    throw UsageError("SpecAugment: max frequency width " +
                     std::to_string(sp.max_freq_width) + " must be < dim " +
                     std::to_string(dim));
  }
  const int max_t = std::min(sp.max_time_width, num_frames);
  for (int i = 0; i < sp.num_time_masks; ++i) {
    const int w = prng.uniform_int(0, max_t);
    const int t0 = prng.uniform_int(0, num_frames - w);
    plan.regions.push_back({t0, t0 + w, 0, dim,
                            std::vector<double>(static_cast<std::size_t>(dim), 0.0),
                            FillKind::Zero});
  }
  for (int i = 0; i < sp.num_freq_masks; ++i) {
    const int w = prng.uniform_int(0, sp.max_freq_width);
    const int f0 = prng.uniform_int(0, dim - w);
    plan.regions.push_back({0, num_frames, f0, f0 + w,
                            std::vector<double>(static_cast<std::size_t>(w), 0.0),
                            FillKind::Zero});
  }
  return plan;
}

MaskPlan plan_utterance(const FeatureMatrix& features,
                        const align::UttAlignment* alignment,
                        const WordPieceVocab* vocab, const MaskConfig& config) {
  config.validate();
  const std::uint64_t seed = derive_utt_seed(config.seed, features.utt_id);
  SplitMix64 prng(seed);
  const int frames = static_cast<int>(features.num_frames());
  const int dim = static_cast<int>(features.dim());

  MaskPlan plan;
  if (config.method == Method::SpecAugment) {
    plan = plan_spec_augment(frames, dim, config, prng);
  } else {
    if (alignment == nullptr) {
      throw DataError("mask: no alignment for '" + features.utt_id + "'");
    }
    switch (config.method) {
      case Method::PhoneMask:
        plan = plan_phone_mask(*alignment, config, prng, frames, dim);
        break;
      case Method::WordMask:
        plan = plan_word_mask(*alignment, config, prng, frames, dim);
        break;
      case Method::WordPieceMask:
        if (vocab == nullptr) throw UsageError("mask: wpm requires a vocabulary");
        plan = plan_word_piece_mask(*alignment, *vocab, config, prng, frames, dim);
        break;
      case Method::SpecAugment:
        break;
    }
    resolve_fills(features, plan, alignment);
  }
  plan.utt_id = features.utt_id;
  plan.seed = seed;
  return plan;
}

}  // namespace redmask::mask
