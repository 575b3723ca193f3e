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
#include <random>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "redmask/align.hpp"
#include "redmask/error.hpp"

using namespace redmask;
using namespace redmask::align;

namespace {

PhoneSegment seg(std::string phone, int start, int n, std::optional<int> word) {
  PhoneSegment p;
  p.phone = std::move(phone);
  p.start_frame = start;
  p.num_frames = n;
  p.word_index = word;
  return p;
}

// Consecutive speech phones, one word each.
UttAlignment run_of(std::initializer_list<std::pair<std::string, int>> phones) {
  std::vector<PhoneSegment> out;
  int t = 0, w = 0;
  for (const auto& [label, n] : phones) {
    out.push_back(seg(label, t, n, w++));
    t += n;
  }
  return make_alignment("u", std::move(out));
}

}  // namespace

TEST_CASE("frames_from_seconds") {
  CHECK(frames_from_seconds(0.00, 0.08, 10.0) == FrameSpan{0, 8});
  CHECK(frames_from_seconds(0.005, 0.011, 10.0) == FrameSpan{1, 1});
  CHECK(frames_from_seconds(0.10, 0.02, 10.0) == FrameSpan{10, 2});
}

TEST_CASE("adjacent segments quantize to adjacent frame ranges") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> start(0.0, 30.0), dur(0.004, 0.5);
  for (int i = 0; i < 20000; ++i) {
    const double s = start(rng), d1 = dur(rng), d2 = dur(rng);
    const FrameSpan a = frames_from_seconds(s, d1, 10.0);
    const FrameSpan b = frames_from_seconds(s + d1, d2, 10.0);
    const long long end_a = std::llround((s + d1) * 100.0);
    // Adjacent unless the one-frame floor pushed the first span forward.
    if (a.start_frame + a.num_frames == end_a) {
      CHECK(b.start_frame == a.start_frame + a.num_frames);
    } else {
      CHECK(a.num_frames == 1);
    }
  }
}

TEST_CASE("validate_alignment") {
  const UttAlignment ok = make_alignment("u", {seg("a", 0, 50, 0), seg("b", 50, 48, 0)});
  CHECK_NOTHROW(validate_alignment(ok, 98));
  CHECK_NOTHROW(validate_alignment(ok, 96));

  const UttAlignment over =
      make_alignment("u", {seg("a", 0, 50, 0), seg("b", 50, 51, 0)});
  try {
    validate_alignment(over, 98);
    FAIL("expected error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("alignment exceeds features by 3 > 2") !=
          std::string::npos);
  }

  UttAlignment overlap;
  overlap.utt_id = "u";
  overlap.phones = {seg("a", 0, 10, 0), seg("b", 9, 5, 1), seg("c", 13, 2, 2)};
  try {
    validate_alignment(overlap, 100);
    FAIL("expected error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("overlapping segment 1") != std::string::npos);
  }
}

TEST_CASE("build_word_spans") {
  const std::vector<PhoneSegment> phones{seg("a", 0, 3, 0), seg("b", 3, 4, 0),
                                         seg("c", 7, 5, 1)};
  const auto words = build_word_spans(phones);
  REQUIRE(words.size() == 2);
  CHECK(words[0] == WordSegment{0, 0, 2, 0, 7});
  CHECK(words[1] == WordSegment{1, 2, 3, 7, 5});

  const std::vector<PhoneSegment> silence{seg("SIL", 0, 3, std::nullopt)};
  CHECK(build_word_spans(silence).empty());

  const std::vector<PhoneSegment> split{seg("a", 0, 3, 0), seg("SIL", 3, 3, std::nullopt),
                                        seg("b", 6, 3, 0)};
  try {
    build_word_spans(split);
    FAIL("expected error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("word 0 split by other material") !=
          std::string::npos);
  }
}

TEST_CASE("word spans round-trip through their phones") {
  const auto corpus = oracle::synthetic_corpus(50, 4);
  for (const auto& a : corpus.alignments) {
    std::vector<int> from_phones, from_words;
    for (const auto& p : a.phones) {
      if (p.word_index && (from_phones.empty() || from_phones.back() != *p.word_index)) {
        from_phones.push_back(*p.word_index);
      }
    }
    for (const auto& w : a.words) {
      from_words.push_back(w.word_index);
      int frames = 0;
      for (std::size_t i = w.phone_begin; i < w.phone_end; ++i) {
        frames += a.phones[i].num_frames;
      }
      CHECK(frames == w.num_frames);
    }
    CHECK(from_phones == from_words);
  }
}

TEST_CASE("duration_stats reproduces the average phone durations") {
  // 0.08 s
  const std::vector<UttAlignment> one{run_of({{"a", 8}})};
  CHECK(duration_stats(one, 10.0).overall_mean_sec == 0.08);

  // 0.14 / 0.10 / 0.08 s
  const std::vector<UttAlignment> three{run_of({{"x", 14}, {"y", 10}, {"z", 8}}),
                                        run_of({{"x", 14}, {"z", 8}})};
  const DurationStats s = duration_stats(three, 10.0);
  CHECK(s.per_phone.at("x").mean_sec == 0.14);
  CHECK(s.per_phone.at("y").mean_sec == 0.10);
  CHECK(s.per_phone.at("z").mean_sec == 0.08);
  CHECK(s.per_phone.at("x").count == 2);

  const std::vector<UttAlignment> shorts{run_of({{"a", 3}, {"b", 3}, {"c", 4}, {"d", 5}})};
  CHECK(duration_stats(shorts, 10.0).short_phone_ratio == 0.5);

  const std::vector<UttAlignment> silent{
      make_alignment("u", {seg("SIL", 0, 5, std::nullopt)})};
  CHECK_THROWS_AS(duration_stats(silent, 10.0), DataError);
}

TEST_CASE("duration_stats agrees with a naive recomputation") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto corpus = oracle::synthetic_corpus(20, seed);
    double sum = 0.0;
    std::size_t n = 0, threes = 0;
    for (const auto& a : corpus.alignments) {
      for (const auto& p : a.phones) {
        if (p.is_silence()) continue;
        sum += p.num_frames;
        ++n;
        threes += p.num_frames == 3;
      }
    }
    const DurationStats s = duration_stats(corpus.alignments, 10.0);
    CHECK(s.total_count == n);
    CHECK(s.overall_mean_sec == sum * 10.0 / (1000.0 * static_cast<double>(n)));
    CHECK(s.short_phone_ratio == static_cast<double>(threes) / static_cast<double>(n));
  }
}

TEST_CASE("quantized lengths track total duration") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> dur(0.01, 0.3);
  for (int trial = 0; trial < 500; ++trial) {
    double t = 0.0;
    int total_frames = 0;
    const int segments = 1 + trial % 40;
    for (int i = 0; i < segments; ++i) {
      const double d = dur(rng);
      total_frames += frames_from_seconds(t, d, 10.0).num_frames;
      t += d;
    }
    CHECK(std::abs(total_frames - std::llround(t * 100.0)) <= segments);
  }
}
