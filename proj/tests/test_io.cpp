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
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "redmask/error.hpp"
#include "redmask/io.hpp"

using namespace redmask;

namespace {

std::vector<std::uint8_t> wav_header(std::uint16_t format, std::uint16_t channels,
                                     std::uint16_t bits, std::uint32_t data_bytes,
                                     std::uint32_t declared_data) {
  Waveform w;
  w.samples.assign(data_bytes / 2, 0.0);
  auto bytes = io::encode_wav(w);
  auto put16 = [&](std::size_t at, std::uint16_t v) {
    bytes[at] = std::uint8_t(v);
    bytes[at + 1] = std::uint8_t(v >> 8);
  };
  put16(20, format);
  put16(22, channels);
  put16(34, bits);
  for (int i = 0; i < 4; ++i) bytes[40 + i] = std::uint8_t(declared_data >> (8 * i));
  return bytes;
}

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("read_wav: zero signal, full-scale negative, header errors") {
  Waveform zeros;
  zeros.samples.assign(16000, 0.0);
  const Waveform back = io::parse_wav(io::encode_wav(zeros));
  CHECK(back.sample_rate == 16000);
  CHECK(back.samples.size() == 16000);
  CHECK(std::all_of(back.samples.begin(), back.samples.end(),
                    [](double s) { return s == 0.0; }));

  auto bytes = io::encode_wav(zeros);
  bytes[44] = 0x00;
  bytes[45] = 0x80;  // int16 -32768
  CHECK(io::parse_wav(bytes).samples[0] == -1.0);

  CHECK(error_of([] { io::parse_wav(wav_header(1, 2, 16, 8, 8)); })
            .find("channels=2 unsupported") != std::string::npos);
  CHECK(error_of([] { io::parse_wav(wav_header(3, 1, 16, 8, 8)); })
            .find("audio_format=3") != std::string::npos);
  CHECK(error_of([] { io::parse_wav(wav_header(1, 1, 8, 8, 8)); })
            .find("bits_per_sample=8") != std::string::npos);
  CHECK(error_of([] { io::parse_wav(wav_header(1, 1, 16, 8, 100)); })
            .find("truncated") != std::string::npos);
  const std::vector<std::uint8_t> junk{'R', 'I', 'F', 'F'};
  CHECK_THROWS_AS(io::parse_wav(junk), FormatError);
}

TEST_CASE("WAV round-trips 16-bit samples exactly") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> sample(-32768, 32767);
  for (int trial = 0; trial < 20; ++trial) {
    Waveform w;
    w.sample_rate = 8000 + 1000 * trial;
    w.samples.resize(1 + trial * 37);
    for (double& s : w.samples) s = sample(rng) / 32768.0;
    const auto bytes = io::encode_wav(w);
    const Waveform back = io::parse_wav(bytes);
    CHECK(back.sample_rate == w.sample_rate);
    CHECK(back.samples == w.samples);
    CHECK(io::encode_wav(back) == bytes);
  }
}

TEST_CASE("feature archive round-trip and errors") {
  FeatureArchive a;
  FeatureMatrix f;
  f.utt_id = "u1";
  f.data = Matrix(2, 3, std::vector<double>{1.5, -2, 3e-300, 0.1, 1.0 / 3, -0.0});
  a.add(f);
  std::stringstream ss;
  io::write_feature_archive(a, ss);
  const FeatureArchive b = io::read_feature_archive(ss);
  REQUIRE(b.size() == 1);
  CHECK(b[0].utt_id == "u1");
  CHECK(b[0].data == f.data);

  std::stringstream empty;
  CHECK(io::read_feature_archive(empty).empty());

  std::stringstream ragged("u1  [\n  1 2\n  1 2 3 ]\n");
  try {
    io::read_feature_archive(ragged);
    FAIL("expected ragged-row error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }

  std::stringstream unterminated("u1  [\n  1 2\n");
  CHECK_THROWS_AS(io::read_feature_archive(unterminated), FormatError);
  std::stringstream no_bracket("u1 1 2 3\n");
  CHECK_THROWS_AS(io::read_feature_archive(no_bracket), FormatError);
  std::stringstream dup("u1 [ 1 ]\nu1 [ 2 ]\n");
  CHECK_THROWS_AS(io::read_feature_archive(dup), FormatError);

  FeatureMatrix bad;
  bad.utt_id = "has space";
  FeatureArchive c;
  CHECK_THROWS_AS(c.add(bad), DataError);
}

TEST_CASE("feature archive preserves arbitrary doubles bit for bit") {
  std::mt19937_64 rng(11);
  FeatureArchive a;
  for (int u = 0; u < 5; ++u) {
    FeatureMatrix f;
    f.utt_id = "utt-" + std::to_string(u);
    f.data = Matrix(7, 4);
    for (double& v : f.data.values()) {
      std::uint64_t bits = rng();
      std::memcpy(&v, &bits, sizeof v);
      if (!std::isfinite(v)) v = std::numeric_limits<double>::denorm_min();
    }
    a.add(f);
  }
  std::stringstream ss;
  io::write_feature_archive(a, ss);
  const FeatureArchive b = io::read_feature_archive(ss);
  REQUIRE(b.size() == a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::memcmp(a[i].data.values().data(), b[i].data.values().data(),
                      a[i].data.values().size() * sizeof(double)) == 0);
  }
}

TEST_CASE("read_ctm: phones, silence, errors") {
  std::stringstream ok(
      "# comment\n"
      "u1 1 0.00 0.05 SIL -\n"
      "u1 1 0.05 0.08 a 0\n"
      "u1 1 0.13 0.04 b 0\n"
      "u2 1 0.00 0.08 a 0\n");
  const auto utts = io::read_ctm(ok);
  REQUIRE(utts.size() == 2);
  const auto& u1 = utts[0];
  REQUIRE(u1.phones.size() == 3);
  CHECK(u1.phones[0].is_silence());
  CHECK(u1.phones[0].num_frames == 5);
  CHECK(u1.phones[1].word_index == 0);
  CHECK(u1.phones[1].start_frame == 5);
  CHECK(u1.phones[1].num_frames == 8);
  REQUIRE(u1.words.size() == 1);
  CHECK(u1.words[0].start_frame == 5);
  CHECK(u1.words[0].num_frames == 12);
  CHECK(utts[1].phones[0].num_frames == 8);

  std::stringstream neg("u1 1 0.00 0.08 a 0\nu1 1 0.10 -0.02 b 0\n");
  try {
    io::read_ctm(neg);
    FAIL("expected error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("negative duration") != std::string::npos);
  }
  std::stringstream nonmono("u1 1 0.10 0.08 a 0\nu1 1 0.05 0.02 b 0\n");
  CHECK_THROWS_AS(io::read_ctm(nonmono), FormatError);
  std::stringstream split("u1 1 0.00 0.03 a 0\nu1 1 0.03 0.03 SIL -\nu1 1 0.06 0.03 b 0\n");
  try {
    io::read_ctm(split);
    FAIL("expected error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("read_ctm without a word column") {
  std::stringstream in("u1 1 0.00 0.05 sil\nu1 1 0.05 0.03 a\nu1 1 0.08 0.03 b\n");
  const auto utts = io::read_ctm(in);
  REQUIRE(utts[0].phones.size() == 3);
  CHECK(utts[0].phones[0].is_silence());
  CHECK(utts[0].words.size() == 2);
}

TEST_CASE("read_ctm rejects garbage lines with their line number") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> tokens{"u1", "1", "0.5", "-0.1", "x", "-", "abc",
                                        "1e999", "nan", "#", "", "0", "3", "-7"};
  std::uniform_int_distribution<std::size_t> pick(0, tokens.size() - 1);
  std::uniform_int_distribution<int> count(0, 8);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text = "u1 1 0.00 0.05 a 0\nu1 1 0.05 0.05 b 0\n";
    std::string garbage;
    for (int k = count(rng); k > 0; --k) garbage += tokens[pick(rng)] + " ";
    text += garbage + "\n";
    std::stringstream in(text);
    try {
      io::read_ctm(in);
    } catch (const FormatError& e) {
      CHECK(e.line() == 3);
    }
  }
}

TEST_CASE("read_vocab") {
  std::stringstream three("ab\na\nb\n");
  CHECK(io::read_vocab(three).size() == 3);
  std::stringstream empty;
  CHECK(io::read_vocab(empty).empty());
  std::stringstream dup("a\nb\na\n");
  const std::string msg = error_of([&] { io::read_vocab(dup); });
  CHECK(msg.find("duplicate piece 'a'") != std::string::npos);
}
