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
#include <numeric>

#include "redmask/error.hpp"
#include "redmask/mask.hpp"

namespace redmask::mask {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() {
  state_ += kGamma;
  return splitmix64_mix(state_);
}

std::uint64_t SplitMix64::uniform(std::uint64_t bound) {
  // Reject the short final bucket so every residue is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

int SplitMix64::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  return lo + static_cast<int>(uniform(span));
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t derive_utt_seed(std::uint64_t global_seed, std::string_view utt_id) {
  return splitmix64_mix((fnv1a64(utt_id) ^ global_seed) + kGamma);
}

std::size_t selection_count(double ratio, std::size_t n) {
  if (n == 0 || !(ratio > 0)) return 0;
  const auto k = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
  return std::clamp<std::size_t>(k, 1, n);
}

std::vector<std::size_t> select_without_replacement(std::size_t n, std::size_t k,
                                                    SplitMix64& prng) {
  if (k > n) throw DataError("selection: k > n");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(prng.uniform(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::PhoneMask: return "pm";
    case Method::WordPieceMask: return "wpm";
    case Method::WordMask: return "stm";
    case Method::SpecAugment: return "specaugment";
  }
  return "?";
}

std::string_view fill_kind_name(FillKind k) {
  switch (k) {
    case FillKind::UtteranceMean: return "utt_mean";
    case FillKind::WordMean: return "word_mean";
    case FillKind::Zero: return "zero";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "pm") return Method::PhoneMask;
  if (name == "wpm") return Method::WordPieceMask;
  if (name == "stm") return Method::WordMask;
  if (name == "specaugment") return Method::SpecAugment;
  throw UsageError("unknown mask method '" + std::string(name) +
                   "' (expected pm|wpm|stm|specaugment)");
}

FillStrategy parse_fill(std::string_view name) {
  if (name == "utt") return FillStrategy::UtteranceMean;
  if (name == "word") return FillStrategy::WordMean;
  throw UsageError("unknown fill '" + std::string(name) +
                   "' (expected utt|word)");
}

void MaskConfig::validate() const {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw UsageError("mask ratio must be in [0, 1]");
  }
  if (spec.max_freq_width < 0 || spec.max_time_width < 0 ||
      spec.num_freq_masks < 0 || spec.num_time_masks < 0) {
    throw UsageError("SpecAugment widths and counts must be >= 0");
  }
}

}  // namespace redmask::mask
