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

#include <cmath>
#include <string>
#include <vector>

#include "redmask/error.hpp"
#include "redmask/frontend.hpp"
#include "redmask/simd.hpp"

namespace redmask::frontend {

FeatureMatrix apply_cmvn(const FeatureMatrix& features) {
  const std::size_t frames = features.num_frames();
  const std::size_t dims = features.dim();
  if (frames < 2) {
    throw DataError("cmvn: '" + features.utt_id + "' has " +
                    std::to_string(frames) + " frame(s), need >= 2");
  }
  for (double v : features.data.values()) {
    if (!std::isfinite(v)) {
      throw DataError("cmvn: non-finite value in '" + features.utt_id + "'");
    }
  }

  const auto& k = simd::kernels();
  const Matrix& x = features.data;
  std::vector<double> mean(dims, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    k.accumulate(x.row(t).data(), mean.data(), dims);
  }
  for (double& m : mean) m /= static_cast<double>(frames);

  std::vector<double> var(dims, 0.0);
  for (std::size_t t = 0; t < frames; ++t) {
    k.accumulate_sq_diff(x.row(t).data(), mean.data(), var.data(), dims);
  }

  // Constant dimensions get scale 0, which maps them to exactly zero.
  std::vector<double> scale(dims, 0.0);
  for (std::size_t d = 0; d < dims; ++d) {
    bool constant = true;
    for (std::size_t t = 1; t < frames && constant; ++t) {
      constant = x(t, d) == x(0, d);
    }
    if (!constant) {
      scale[d] = 1.0 / std::sqrt(var[d] / static_cast<double>(frames));
    }
  }

  FeatureMatrix out = features;
  for (std::size_t t = 0; t < frames; ++t) {
    k.shift_scale(x.row(t).data(), mean.data(), scale.data(),
                  out.data.row(t).data(), dims);
  }
  return out;
}

}  // namespace redmask::frontend
