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
#include <memory>
#include <span>
#include <vector>

#include "redmask/align.hpp"
#include "redmask/io.hpp"
#include "redmask/matrix.hpp"

namespace redmask::frontend {

struct MfccConfig {
  int sample_rate = 16000;
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  int num_ceps = 40;
  int num_mel_filters = 40;
  int fft_size = 512;
  double preemphasis = 0.97;
  double mel_low_hz = 20.0;
  // Non-positive values are offsets from Nyquist.
  double mel_high_hz = -400.0;
  double log_floor = 1e-10;

  int frame_samples() const;
  int shift_samples() const;
  double mel_high_resolved() const;
  // Throws UsageError if the configuration is inconsistent.
  void validate() const;

  friend bool operator==(const MfccConfig&, const MfccConfig&) = default;
};

// Number of frames emitted for n samples (snip-edges: only whole frames).
std::size_t num_frames(std::size_t num_samples, const MfccConfig& config);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular mel filterbank over FFT bins [0, fft_size/2]. Row m holds the
// weights of filter m.
struct MelBank {
  Matrix weights;
  std::vector<double> center_hz;
};
MelBank make_mel_bank(const MfccConfig& config);

// Orthonormal DCT-II, num_ceps x num_mel_filters.
Matrix make_dct_matrix(int num_ceps, int num_filters);

// Pre-emphasis, Hamming window, |FFT|^2, mel filterbank, log floor, DCT-II.
// Owns an FFT plan; one instance per thread.
class MfccExtractor {
 public:
  explicit MfccExtractor(MfccConfig config = {});
  ~MfccExtractor();
  MfccExtractor(const MfccExtractor&) = delete;
  MfccExtractor& operator=(const MfccExtractor&) = delete;

  const MfccConfig& config() const noexcept { return config_; }
  const MelBank& mel_bank() const noexcept { return bank_; }
  const Matrix& dct() const noexcept { return dct_; }
  std::span<const double> window() const noexcept { return window_; }

  // T x num_mel_filters linear filterbank energies (before the log).
  Matrix filterbank_energies(const Waveform& wave);
  // T x num_ceps.
  FeatureMatrix compute(const Waveform& wave, std::string utt_id = {});

 private:
  void check_input(const Waveform& wave) const;
  // Power spectrum of frame t into power_.
  void power_spectrum(std::span<const double> samples, std::size_t t);

  struct Fft;
  MfccConfig config_;
  MelBank bank_;
  Matrix dct_;
  std::vector<double> window_;
  std::vector<double> frame_;
  std::vector<double> power_;
  std::unique_ptr<Fft> fft_;
};

FeatureMatrix compute_mfcc(const Waveform& wave, const MfccConfig& config = {},
                           std::string utt_id = {});

// Per-utterance mean and variance normalization. Dimensions that are
// constant across frames map to zero. Throws DataError for T < 2 or
// non-finite input.
FeatureMatrix apply_cmvn(const FeatureMatrix& features);

struct SpeedPerturbOptions {
  int zero_crossings = 16;
  double kaiser_beta = 8.0;
};

// Resamples by 1/factor with a Kaiser-windowed sinc, so played back at the
// original rate the signal is factor times faster. Factor 1.0 returns the
// input unchanged. Throws UsageError unless factor is in (0.5, 2.0).
Waveform speed_perturb(const Waveform& wave, double factor,
                       const SpeedPerturbOptions& options = {});

// Divides segment times by factor and re-quantizes to frames.
align::UttAlignment scale_alignment(const align::UttAlignment& alignment,
                                    double factor);

void check_speed_factor(double factor);

}  // namespace redmask::frontend
