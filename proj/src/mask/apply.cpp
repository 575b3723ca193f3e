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
#include <optional>
#include <string>

#include "redmask/error.hpp"
#include "redmask/mask.hpp"
#include "redmask/simd.hpp"

namespace redmask::mask {
namespace {

std::vector<double> column_mean(const Matrix& x, std::size_t begin,
                                std::size_t end) {
  const auto& k = simd::kernels();
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t t = begin; t < end; ++t) {
    k.accumulate(x.row(t).data(), mean.data(), x.cols());
  }
  const double n = static_cast<double>(end - begin);
  for (double& m : mean) m /= n;
  return mean;
}

std::optional<align::WordSegment> containing_word(
    const align::UttAlignment& alignment, const MaskRegion& region) {
  for (const auto& w : alignment.words) {
    if (w.start_frame <= region.start_frame && region.end_frame <= w.end_frame()) {
      return w;
    }
  }
  return std::nullopt;
}

std::vector<double> band(const std::vector<double>& full, const MaskRegion& r) {
  return {full.begin() + r.d0, full.begin() + r.d1};
}

}  // namespace

Fill compute_fill(const FeatureMatrix& features, const MaskRegion& region,
                  FillStrategy strategy, const align::UttAlignment* alignment) {
  const Matrix& x = features.data;
  if (x.rows() == 0 || x.cols() == 0) {
    throw DataError("fill: empty feature matrix '" + features.utt_id + "'");
  }
  if (region.d0 < 0 || region.d1 < region.d0 ||
      static_cast<std::size_t>(region.d1) > x.cols()) {
    throw DataError("fill: region dims out of range for '" + features.utt_id + "'");
  }
  if (strategy == FillStrategy::WordMean && alignment != nullptr) {
    if (auto w = containing_word(*alignment, region)) {
      const auto begin = static_cast<std::size_t>(std::max(0, w->start_frame));
      const auto end = std::min<std::size_t>(x.rows(), static_cast<std::size_t>(w->end_frame()));
      if (end > begin) {
        return {band(column_mean(x, begin, end), region), FillKind::WordMean};
      }
    }
  }
  return {band(column_mean(x, 0, x.rows()), region), FillKind::UtteranceMean};
}

void resolve_fills(const FeatureMatrix& features, MaskPlan& plan,
                   const align::UttAlignment* alignment) {
  std::optional<std::vector<double>> utt_mean;
  for (MaskRegion& r : plan.regions) {
    if (r.fill_kind == FillKind::Zero) continue;
    if (plan.config.fill == FillStrategy::UtteranceMean) {
      if (!utt_mean) {
        if (features.data.empty()) {
          throw DataError("fill: empty feature matrix '" + features.utt_id + "'");
        }
        utt_mean = column_mean(features.data, 0, features.num_frames());
      }
      r.fill = band(*utt_mean, r);
      r.fill_kind = FillKind::UtteranceMean;
      continue;
    }
    Fill f = compute_fill(features, r, plan.config.fill, alignment);
    r.fill = std::move(f.values);
    r.fill_kind = f.kind;
  }
}

FeatureMatrix apply_mask(const FeatureMatrix& features, const MaskPlan& plan) {
  const auto rows = static_cast<int>(features.num_frames());
  const auto cols = static_cast<int>(features.dim());
  for (std::size_t i = 0; i < plan.regions.size(); ++i) {
    const MaskRegion& r = plan.regions[i];
    if (r.start_frame < 0 || r.end_frame < r.start_frame || r.end_frame > rows ||
        r.d0 < 0 || r.d1 < r.d0 || r.d1 > cols) {
      throw DataError("mask: region " + std::to_string(i) + " [" +
                      std::to_string(r.start_frame) + "," +
                      std::to_string(r.end_frame) + ")x[" + std::to_string(r.d0) +
                      "," + std::to_string(r.d1) + ") outside " +
                      std::to_string(rows) + "x" + std::to_string(cols) +
                      " matrix '" + features.utt_id + "'");
    }
    if (r.fill.size() != static_cast<std::size_t>(r.d1 - r.d0)) {
      throw DataError("mask: region " + std::to_string(i) + " fill has " +
                      std::to_string(r.fill.size()) + " values for " +
                      std::to_string(r.d1 - r.d0) + " dims");
    }
  }
  FeatureMatrix out = features;
  for (const MaskRegion& r : plan.regions) {
    for (int t = r.start_frame; t < r.end_frame; ++t) {
      std::copy(r.fill.begin(), r.fill.end(), out.data.row(t).begin() + r.d0);
    }
  }
  return out;
}

}  // namespace redmask::mask
