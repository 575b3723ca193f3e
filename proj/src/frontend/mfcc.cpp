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

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "redmask/error.hpp"
#include "redmask/frontend.hpp"
#include "redmask/simd.hpp"

namespace redmask::frontend {

int MfccConfig::frame_samples() const {
  return static_cast<int>(std::lround(sample_rate * frame_length_ms / 1000.0));
}

int MfccConfig::shift_samples() const {
  return static_cast<int>(std::lround(sample_rate * frame_shift_ms / 1000.0));
}

double MfccConfig::mel_high_resolved() const {
  const double nyquist = sample_rate / 2.0;
  return mel_high_hz > 0 ? mel_high_hz : nyquist + mel_high_hz;
}

void MfccConfig::validate() const {
  if (sample_rate <= 0) throw UsageError("mfcc: sample_rate must be > 0");
  if (frame_samples() < 1 || shift_samples() < 1) {
    throw UsageError("mfcc: frame length and shift must cover >= 1 sample");
  }
  if (num_ceps < 1 || num_ceps > num_mel_filters) {
    throw UsageError("mfcc: need 1 <= num_ceps <= num_mel_filters");
  }
  if (fft_size < frame_samples()) {
    throw UsageError("mfcc: fft_size " + std::to_string(fft_size) +
                     " shorter than frame (" + std::to_string(frame_samples()) +
                     " samples)");
  }
  const double high = mel_high_resolved();
  if (!(mel_low_hz >= 0 && mel_low_hz < high && high <= sample_rate / 2.0)) {
    throw UsageError("mfcc: need 0 <= mel_low < mel_high <= Nyquist");
  }
  if (!(log_floor > 0)) throw UsageError("mfcc: log_floor must be > 0");
}

std::size_t num_frames(std::size_t num_samples, const MfccConfig& config) {
  const auto frame = static_cast<std::size_t>(config.frame_samples());
  const auto shift = static_cast<std::size_t>(config.shift_samples());
  if (num_samples < frame) return 0;
  return (num_samples - frame) / shift + 1;
}

double hz_to_mel(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

MelBank make_mel_bank(const MfccConfig& config) {
  config.validate();
  const int num_bins = config.fft_size / 2 + 1;
  const int m = config.num_mel_filters;
  const double mel_low = hz_to_mel(config.mel_low_hz);
  const double mel_high = hz_to_mel(config.mel_high_resolved());
  const double delta = (mel_high - mel_low) / (m + 1);
  const double bin_hz = static_cast<double>(config.sample_rate) / config.fft_size;

  MelBank bank;
  bank.weights = Matrix(static_cast<std::size_t>(m), num_bins);
  bank.center_hz.resize(m);
  for (int f = 0; f < m; ++f) {
    const double left = mel_low + f * delta;
    const double center = left + delta;
    const double right = center + delta;
    bank.center_hz[f] = mel_to_hz(center);
    for (int k = 0; k < num_bins; ++k) {
      const double mel = hz_to_mel(k * bin_hz);
      if (mel <= left || mel >= right) continue;
      bank.weights(f, k) =
          mel <= center ? (mel - left) / (center - left)
                        : (right - mel) / (right - center);
    }
  }
  return bank;
}

Matrix make_dct_matrix(int num_ceps, int num_filters) {
  Matrix dct(static_cast<std::size_t>(num_ceps), num_filters);
  const double n = num_filters;
  for (int k = 0; k < num_ceps; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (int j = 0; j < num_filters; ++j) {
      dct(k, j) = scale * std::cos(std::numbers::pi * k * (j + 0.5) / n);
    }
  }
  return dct;
}

// FFTW planning is not thread-safe; execution on a private plan is.
struct MfccExtractor::Fft {
  explicit Fft(int n) : size(n) {
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    static std::mutex planner_mutex;
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  ~Fft() {
    {
      static std::mutex destroy_mutex;
      std::lock_guard lock(destroy_mutex);
      fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
  }
  int size;
  double* in;
  fftw_complex* out;
  fftw_plan plan;
};

MfccExtractor::MfccExtractor(MfccConfig config)
    : config_(config),
      bank_(make_mel_bank(config_)),
      dct_(make_dct_matrix(config_.num_ceps, config_.num_mel_filters)),
      fft_(std::make_unique<Fft>(config_.fft_size)) {
  const int n = config_.frame_samples();
  window_.resize(n);
  for (int i = 0; i < n; ++i) {
    window_[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  }
  frame_.resize(n);
  power_.resize(config_.fft_size / 2 + 1);
}

MfccExtractor::~MfccExtractor() = default;

void MfccExtractor::check_input(const Waveform& wave) const {
  if (wave.sample_rate != config_.sample_rate) {
    throw DataError("mfcc: sample_rate " + std::to_string(wave.sample_rate) +
                    " does not match config " +
                    std::to_string(config_.sample_rate));
  }
  if (wave.samples.size() < static_cast<std::size_t>(config_.frame_samples())) {
    throw DataError("mfcc: waveform too short (" +
                    std::to_string(wave.samples.size()) + " samples < " +
                    std::to_string(config_.frame_samples()) + ")");
  }
}

void MfccExtractor::power_spectrum(std::span<const double> samples,
                                   std::size_t t) {
  const auto& k = simd::kernels();
  const std::size_t n = frame_.size();
  const double* src = samples.data() + t * config_.shift_samples();
  // Pre-emphasis within the frame; the first sample is emphasized
  // against itself.
  const double a = config_.preemphasis;
  frame_[0] = src[0] - a * src[0];
  for (std::size_t i = 1; i < n; ++i) frame_[i] = src[i] - a * src[i - 1];
  k.multiply(frame_.data(), window_.data(), fft_->in, n);
  for (int i = static_cast<int>(n); i < fft_->size; ++i) fft_->in[i] = 0.0;
  fftw_execute(fft_->plan);
  for (std::size_t b = 0; b < power_.size(); ++b) {
    const double re = fft_->out[b][0];
    const double im = fft_->out[b][1];
    power_[b] = re * re + im * im;
  }
}

Matrix MfccExtractor::filterbank_energies(const Waveform& wave) {
  check_input(wave);
  const auto& k = simd::kernels();
  const std::size_t frames = num_frames(wave.samples.size(), config_);
  const std::size_t m = bank_.weights.rows();
  Matrix energies(frames, m);
  for (std::size_t t = 0; t < frames; ++t) {
    power_spectrum(wave.samples, t);
    for (std::size_t f = 0; f < m; ++f) {
      energies(t, f) = k.dot(bank_.weights.row(f).data(), power_.data(),
                             power_.size());
    }
  }
  return energies;
}

FeatureMatrix MfccExtractor::compute(const Waveform& wave, std::string utt_id) {
  const Matrix energies = filterbank_energies(wave);
  const auto& k = simd::kernels();
  const std::size_t frames = energies.rows();
  const std::size_t m = energies.cols();
  const std::size_t d = dct_.rows();

  FeatureMatrix out;
  out.utt_id = std::move(utt_id);
  out.frame_shift_ms = config_.frame_shift_ms;
  out.frame_length_ms = config_.frame_length_ms;
  out.data = Matrix(frames, d);
  std::vector<double> logs(m);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t f = 0; f < m; ++f) {
      logs[f] = std::log(std::max(energies(t, f), config_.log_floor));
    }
    for (std::size_t c = 0; c < d; ++c) {
      out.data(t, c) = k.dot(dct_.row(c).data(), logs.data(), m);
    }
  }
  return out;
}

FeatureMatrix compute_mfcc(const Waveform& wave, const MfccConfig& config,
                           std::string utt_id) {
  MfccExtractor extractor(config);
  return extractor.compute(wave, std::move(utt_id));
}

}  // namespace redmask::frontend
