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
#include <numbers>
#include <string>

#include "redmask/error.hpp"
#include "redmask/frontend.hpp"
#include "redmask/simd.hpp"

namespace redmask::frontend {
namespace {

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

void check_speed_factor(double factor) {
  if (!(factor > 0.5 && factor < 2.0)) {
    throw UsageError("speed factor " + std::to_string(factor) +
                     " outside (0.5, 2.0)");
  }
}

Waveform speed_perturb(const Waveform& wave, double factor,
                       const SpeedPerturbOptions& options) {
  check_speed_factor(factor);
  if (factor == 1.0) return wave;
  if (wave.samples.empty()) throw DataError("speed perturb: empty waveform");

  const auto n = static_cast<long long>(wave.samples.size());
  const auto m = static_cast<long long>(std::llround(n / factor));
  // factor > 1: low-pass at the new Nyquist.
  const double cutoff = std::min(1.0, 1.0 / factor);
  const double half_width = options.zero_crossings / cutoff;
  const double beta = options.kaiser_beta;
  const double i0_beta = std::cyl_bessel_i(0.0, beta);

  const auto& k = simd::kernels();
  Waveform out;
  out.sample_rate = wave.sample_rate;
  out.samples.resize(static_cast<std::size_t>(m));
  std::vector<double> taps;
  for (long long j = 0; j < m; ++j) {
    const double t = static_cast<double>(j) * factor;
    const long long lo = std::max<long long>(0, static_cast<long long>(std::ceil(t - half_width)));
    const long long hi = std::min<long long>(n - 1, static_cast<long long>(std::floor(t + half_width)));
    if (hi < lo) continue;
    taps.resize(static_cast<std::size_t>(hi - lo + 1));
    for (long long i = lo; i <= hi; ++i) {
      const double d = t - static_cast<double>(i);
      const double u = d / half_width;
      const double win =
          std::abs(u) >= 1.0
              ? 0.0
              : std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - u * u)) / i0_beta;
      taps[static_cast<std::size_t>(i - lo)] = cutoff * sinc(cutoff * d) * win;
    }
    out.samples[static_cast<std::size_t>(j)] =
        k.dot(taps.data(), wave.samples.data() + lo, taps.size());
  }
  return out;
}

align::UttAlignment scale_alignment(const align::UttAlignment& alignment,
                                    double factor) {
  check_speed_factor(factor);
  if (factor == 1.0) return alignment;
  align::UttAlignment out = alignment;
  for (align::PhoneSegment& p : out.phones) {
    p.start_sec /= factor;
    p.dur_sec /= factor;
    const auto span =
        align::frames_from_seconds(p.start_sec, p.dur_sec, out.frame_shift_ms);
    p.start_frame = span.start_frame;
    p.num_frames = span.num_frames;
  }
  out.words = align::build_word_spans(out.phones);
  return out;
}

}  // namespace redmask::frontend
