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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <unistd.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "oracles.hpp"
#include "redmask/frontend.hpp"
#include "redmask/kernel.hpp"
#include "redmask/mask.hpp"
#include "redmask/score.hpp"
#include "redmask/tokenize.hpp"

namespace fs = std::filesystem;
using namespace redmask;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Matrix m(rows, cols);
  for (double& v : m.values()) v = d(rng);
  return m;
}

Matrix rows_layer_norm(const Matrix& x) {
  const std::vector<double> g(x.cols(), 1.0), b(x.cols(), 0.0);
  Matrix out(x.rows(), x.cols());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto y = kernel::layer_norm(x.row(t), g, b);
    std::copy(y.begin(), y.end(), out.row(t).begin());
  }
  return out;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

// 1. CTC vs brute-force enumeration.
Outcome ctc_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::size_t instances = 0, mismatched = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 12; ++rep) {
    for (std::size_t frames = 1; frames <= 5; ++frames) {
      for (std::size_t vocab = 2; vocab <= 3; ++vocab) {
        const Matrix lat = oracle::random_log_lattice(frames, vocab, rng);
        std::uniform_int_distribution<int> label(1, static_cast<int>(vocab) - 1);
        for (std::size_t len = 0; len <= 2; ++len) {
          for (int draw = 0; draw < 2; ++draw) {
            std::vector<int> labels(len);
            for (int& l : labels) l = label(rng);
            const double expected = oracle::ctc_brute_force(lat, labels);
            const auto got = kernel::ctc_loss(lat, labels);
            ++instances;
            if (std::isinf(expected)) {
              mismatched += got.feasible;
            } else {
              const double err = std::abs(got.loss - expected);
              worst = std::max(worst, err);
              mismatched += !got.feasible || err > 1e-8;
            }
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {instances >= 500 && mismatched == 0 && secs < 10.0,
          fmt("%zu instances, %zu mismatched, max |diff| %.2e, %.2f s", instances,
              mismatched, worst, secs)};
}

// 2. Analytic gradients vs central differences.
Outcome gradients() {
  const double h = 1e-5;
  std::mt19937_64 rng(102);
  double worst_ctc = 0.0, worst_ce = 0.0;
  const int instances = 50;
  for (int trial = 0; trial < instances; ++trial) {
    const std::size_t frames = 2 + trial % 4, vocab = 2 + trial % 2;
    Matrix lat = oracle::random_log_lattice(frames, vocab, rng);
    std::vector<int> labels{1};
    if (trial % 3 == 1) labels = {1, static_cast<int>(vocab) - 1};
    if (kernel::ctc_min_frames(labels) > frames) labels = {1};
    const Matrix g = kernel::ctc_gradient(lat, labels);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < lat.values().size(); ++i) {
      const double keep = lat.values()[i];
      lat.values()[i] = keep + h;
      const double up = kernel::ctc_loss(lat, labels).loss;
      lat.values()[i] = keep - h;
      const double down = kernel::ctc_loss(lat, labels).loss;
      lat.values()[i] = keep;
      const double numeric = (up - down) / (2 * h);
      diff = std::max(diff, std::abs(numeric - g.values()[i]));
      scale = std::max({scale, std::abs(numeric), std::abs(g.values()[i])});
    }
    worst_ctc = std::max(worst_ctc, diff / scale);

    std::normal_distribution<double> d;
    std::vector<double> logits(2 + trial % 7);
    for (double& v : logits) v = d(rng);
    const int target = trial % static_cast<int>(logits.size());
    const auto cg = kernel::cross_entropy_gradient(logits, target);
    diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
      auto up = logits, down = logits;
      up[i] += h;
      down[i] -= h;
      const double numeric =
          (kernel::cross_entropy(up, target) - kernel::cross_entropy(down, target)) / (2 * h);
      diff = std::max(diff, std::abs(numeric - cg[i]));
      scale = std::max({scale, std::abs(numeric), std::abs(cg[i])});
    }
    worst_ce = std::max(worst_ce, diff / scale);
  }
  return {worst_ctc < 1e-5 && worst_ce < 1e-5,
          fmt("%d CTC + %d CE instances, max rel err CTC %.2e, CE %.2e", instances, instances,
              worst_ctc, worst_ce)};
}

// 3. Conformer residual structure.
Outcome conformer_structure() {
  std::mt19937_64 rng(103);
  const Matrix x = random_matrix(11, 16, rng);
  const double zero_err =
      max_abs_diff(kernel::conformer_block(x, kernel::KernelParams::zeros(16, 4, 32, 7)),
                   rows_layer_norm(x));

  kernel::KernelParams p = kernel::KernelParams::zeros(16, 4, 32, 7);
  const Matrix c = random_matrix(1, 16, rng);
  p.ffn1.down.bias.assign(c.values().begin(), c.values().end());
  Matrix half = x;
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t d = 0; d < 16; ++d) half(t, d) += 0.5 * c(0, d);
  }
  const double half_err = max_abs_diff(kernel::conformer_block(x, p), rows_layer_norm(half));
  return {zero_err <= 1e-12 && half_err <= 1e-12,
          fmt("zero sub-modules %.2e, half-step FFN %.2e", zero_err, half_err)};
}

// 4. Joint loss and decode score presets.
Outcome joint_arithmetic() {
  const double loss = kernel::joint_loss(1.0, 2.0);
  const double score = kernel::joint_decode_score(-1.0, -3.0);
  return {kernel::kDefaultAlpha == 0.7 && kernel::kDefaultLambda == 0.5 && loss == 1.3 &&
              score == -2.0,
          fmt("joint_loss(1,2) = %.17g, joint_decode_score(-1,-3) = %.17g", loss, score)};
}

// 5. Exact per-utterance counts and the corpus masked fraction.
Outcome ratio_law() {
  const auto t0 = Clock::now();
  const auto corpus = oracle::synthetic_corpus(1000, 105);
  const WordPieceVocab vocab(std::vector<std::string>{"ab", "cd", "ef", "ghi", "a", "e", "j"});
  std::string detail;
  bool ok = true;
  for (mask::Method m :
       {mask::Method::PhoneMask, mask::Method::WordPieceMask, mask::Method::WordMask}) {
    mask::MaskConfig cfg;
    cfg.method = m;
    cfg.ratio = 0.2;
    cfg.seed = 5;
    const auto res = mask::augment_corpus(corpus.archive, corpus.alignments, &vocab, cfg, 4);
    std::size_t units = 0, masked = 0, wrong = 0;
    for (std::size_t i = 0; i < corpus.alignments.size(); ++i) {
      const auto& a = corpus.alignments[i];
      std::size_t n = 0;
      if (m == mask::Method::PhoneMask) {
        for (const auto& p : a.phones) n += !p.is_silence();
      } else if (m == mask::Method::WordMask) {
        n = a.words.size();
      } else {
        for (const auto& w : a.words) {
          const std::span<const align::PhoneSegment> ph(a.phones.data() + w.phone_begin,
                                                        w.phone_end - w.phone_begin);
          n += tokenize::segment_word_pieces(tokenize::spell_word(ph), vocab).size();
        }
      }
      const auto k = static_cast<std::size_t>(
          std::max<long long>(1, std::llround(0.2 * static_cast<double>(n))));
      wrong += res.plans[i].regions.size() != k;
      units += n;
      masked += res.plans[i].regions.size();
    }
    const double fraction = static_cast<double>(masked) / static_cast<double>(units);
    const bool pass = wrong == 0 && fraction >= 0.195 && fraction <= 0.205;
    ok = ok && pass;
    detail += fmt("%s %.4f (%zu/%zu, %zu bad counts)%s", std::string(mask::method_name(m)).c_str(),
                  fraction, masked, units, wrong, m == mask::Method::WordMask ? "" : "; ");
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 5.0, detail + fmt(", %.2f s", secs)};
}

// 6. Filled cells equal the declared fill, everything else is untouched.
Outcome fill_correctness() {
  auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v); };
  const WordPieceVocab vocab(std::vector<std::string>{"ab", "cd", "efg", "h"});
  std::size_t bad_masked = 0, bad_kept = 0, cells = 0;
  const mask::Method methods[] = {mask::Method::PhoneMask, mask::Method::WordPieceMask,
                                  mask::Method::WordMask, mask::Method::SpecAugment};
  for (int run = 0; run < 100; ++run) {
    const auto corpus = oracle::synthetic_corpus(4, 600 + run, 3, 8, 12);
    mask::MaskConfig cfg;
    cfg.method = methods[run % 4];
    cfg.ratio = 0.1 + 0.05 * (run % 5);
    cfg.fill = run % 2 ? mask::FillStrategy::WordMean : mask::FillStrategy::UtteranceMean;
    cfg.spec = {4, 2, 20, 2};
    cfg.seed = static_cast<std::uint64_t>(run);
    const auto res = mask::augment_corpus(corpus.archive, corpus.alignments, &vocab, cfg, 2);
    for (std::size_t u = 0; u < res.archive.size(); ++u) {
      const Matrix& in = corpus.archive[u].data;
      const Matrix& out = res.archive[u].data;
      const auto& regions = res.plans[u].regions;
      for (std::size_t t = 0; t < in.rows(); ++t) {
        for (std::size_t d = 0; d < in.cols(); ++d) {
          ++cells;
          // The last region covering a cell decides its value.
          const mask::MaskRegion* last = nullptr;
          for (const auto& r : regions) {
            if (int(t) >= r.start_frame && int(t) < r.end_frame && int(d) >= r.d0 &&
                int(d) < r.d1) {
              last = &r;
            }
          }
          if (last != nullptr) {
            const double expected = last->fill[d - static_cast<std::size_t>(last->d0)];
            bad_masked += bits(out(t, d)) != bits(expected);
          } else {
            bad_kept += bits(out(t, d)) != bits(in(t, d));
          }
        }
      }
    }
  }
  return {bad_masked == 0 && bad_kept == 0,
          fmt("100 runs, %zu cells, %zu bad masked, %zu changed unmasked", cells, bad_masked,
              bad_kept)};
}

// 7. CLI output independent of --jobs.
Outcome determinism() {
  const fs::path dir =
      fs::temp_directory_path() / ("redmask_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto corpus = oracle::synthetic_corpus(64, 107);
  io::write_feature_archive(corpus.archive, dir / "feats.ark");
  {
    std::ofstream ctm(dir / "ali.ctm");
    io::write_ctm(corpus.alignments, ctm);
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  auto augment = [&](const std::string& jobs) {
    const std::string cmd = std::string(REDMASK_CLI_PATH) + " augment --feats " +
                            (dir / "feats.ark").string() + " --ctm " +
                            (dir / "ali.ctm").string() +
                            " --method pm --ratio 0.2 --fill word --seed 17 --jobs " + jobs +
                            " --out " + (dir / ("j" + jobs + ".ark")).string() +
                            " --plan-log " + (dir / ("j" + jobs + ".tsv")).string() +
                            " 2>/dev/null";
    return std::system(cmd.c_str());
  };
  const int s1 = augment("1"), s8 = augment("8");
  const std::string a1 = slurp(dir / "j1.ark"), a8 = slurp(dir / "j8.ark");
  const std::string p1 = slurp(dir / "j1.tsv"), p8 = slurp(dir / "j8.tsv");
  fs::remove_all(dir);
  const bool ok = s1 == 0 && s8 == 0 && !a1.empty() && a1 == a8 && p1 == p8;
  return {ok, fmt("exit %d/%d, archive %zu bytes %s, plan log %zu bytes %s", s1, s8, a1.size(),
                  a1 == a8 ? "identical" : "DIFFERENT", p1.size(),
                  p1 == p8 ? "identical" : "DIFFERENT")};
}

// 8. CMVN moments.
Outcome cmvn() {
  std::mt19937_64 rng(108);
  double worst_mean = 0.0, worst_var = 0.0;
  bool constant_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    FeatureMatrix f;
    f.utt_id = "u";
    f.data = Matrix(2 + trial * 17, 40);
    std::normal_distribution<double> d(trial - 10.0, 0.5 + trial);
    for (double& v : f.data.values()) v = d(rng);
    // Dimension 7 is constant.
    for (std::size_t t = 0; t < f.data.rows(); ++t) f.data(t, 7) = 3.5;
    const FeatureMatrix out = frontend::apply_cmvn(f);
    const double n = static_cast<double>(out.data.rows());
    for (std::size_t j = 0; j < 40; ++j) {
      double mean = 0.0, var = 0.0;
      for (std::size_t t = 0; t < out.data.rows(); ++t) mean += out.data(t, j);
      mean /= n;
      for (std::size_t t = 0; t < out.data.rows(); ++t) {
        var += (out.data(t, j) - mean) * (out.data(t, j) - mean);
      }
      var /= n;
      if (j == 7) {
        for (std::size_t t = 0; t < out.data.rows(); ++t) constant_ok &= out.data(t, j) == 0.0;
        continue;
      }
      worst_mean = std::max(worst_mean, std::abs(mean));
      worst_var = std::max(worst_var, std::abs(var - 1.0));
    }
  }
  return {worst_mean < 1e-9 && worst_var < 1e-9 && constant_ok,
          fmt("max |mean| %.2e, max |var-1| %.2e, constant dim %s", worst_mean, worst_var,
              constant_ok ? "zero" : "NOT zero")};
}

// 9. Frame counts and tone localization.
Outcome mfcc_framing() {
  std::mt19937_64 rng(109);
  std::uniform_int_distribution<std::size_t> len(400, 48000);
  std::normal_distribution<double> d(0.0, 0.1);
  frontend::MfccExtractor ex;
  std::size_t bad = 0, sweep = 0;
  for (int i = 0; i < 60; ++i, ++sweep) {
    Waveform w;
    w.samples.resize(i < 3 ? 400 + i * 159 : len(rng));
    for (double& s : w.samples) s = d(rng);
    bad += ex.compute(w).num_frames() != (w.samples.size() - 400) / 160 + 1;
  }

  Waveform tone;
  tone.samples = oracle::sine(1000.0, 16000, 4000);
  const Matrix fb = ex.filterbank_energies(tone);
  const int nearest = oracle::nearest_mel_filter(1000.0);
  std::size_t tone_bad = 0;
  double worst = 0.0;
  for (std::size_t t = 0; t < fb.rows(); t += 4) {
    const auto expected = oracle::filterbank_energies(tone.samples, t * 160);
    const auto row = fb.row(t);
    const auto oracle_peak = std::max_element(expected.begin(), expected.end()) - expected.begin();
    const auto peak = std::max_element(row.begin(), row.end()) - row.begin();
    tone_bad += oracle_peak != nearest || peak != nearest;
    for (std::size_t f = 0; f < expected.size(); ++f) {
      worst = std::max(worst, std::abs(row[f] - expected[f]) / (expected[f] + 1e-6));
    }
  }
  return {bad == 0 && tone_bad == 0 && worst < 1e-9,
          fmt("%zu lengths, %zu frame-count mismatches; 1 kHz peak filter %d, %zu bad frames, "
              "max rel diff vs DFT oracle %.2e",
              sweep, bad, nearest, tone_bad, worst)};
}

// 10. Duration statistics fixtures.
Outcome duration_stats() {
  auto utt = [](std::vector<std::pair<std::string, int>> phones) {
    std::vector<align::PhoneSegment> out;
    int t = 0, w = 0;
    for (auto& [label, n] : phones) {
      align::PhoneSegment p;
      p.phone = label;
      p.start_frame = t;
      p.num_frames = n;
      p.word_index = w++;
      t += n;
      out.push_back(p);
    }
    return align::make_alignment("u", out);
  };
  const std::vector<align::UttAlignment> fixture{
      utt({{"x", 14}, {"y", 10}, {"z", 8}}),
      utt({{"x", 14}, {"z", 8}})};
  const auto s = align::duration_stats(fixture, 10.0);
  const double mx = s.per_phone.at("x").mean_sec, my = s.per_phone.at("y").mean_sec,
               mz = s.per_phone.at("z").mean_sec;
  const std::vector<align::UttAlignment> shorts{utt({{"a", 3}, {"b", 3}, {"c", 4}, {"d", 5}})};
  const double ratio = align::duration_stats(shorts, 10.0).short_phone_ratio;
  return {mx == 0.14 && my == 0.10 && mz == 0.08 && ratio == 0.5,
          fmt("means %.17g / %.17g / %.17g s, short_phone_ratio %.17g", mx, my, mz, ratio)};
}

// 11. WER decomposition and the edit-distance oracle.
Outcome wer_identity() {
  const auto [r1, h1] = oracle::wer_corpus(104, 14, 7);
  const auto [r2, h2] = oracle::wer_corpus(83, 12, 5);
  const auto a = score::score_corpus(r1, h1);
  const auto b = score::score_corpus(r2, h2);
  const bool rows = a.wer_percent() == 12.5 && a.sub_rate() == 10.4 && a.del_rate() == 1.4 &&
                    a.ins_rate() == 0.7 && b.wer_percent() == 10.0 && b.sub_rate() == 8.3 &&
                    b.del_rate() == 1.2 && b.ins_rate() == 0.5;

  std::mt19937_64 rng(111);
  std::uniform_int_distribution<int> len(0, 8), sym(0, 3);
  std::size_t mismatched = 0;
  const int pairs = 1200;
  for (int i = 0; i < pairs; ++i) {
    std::vector<std::string> ref(len(rng)), hyp(len(rng));
    for (auto& s : ref) s = std::string(1, char('a' + sym(rng)));
    for (auto& s : hyp) s = std::string(1, char('a' + sym(rng)));
    mismatched += score::align_edit(ref, hyp).errors() != oracle::edit_distance(ref, hyp);
  }
  return {rows && mismatched == 0,
          fmt("WER %.1f (%.1f/%.1f/%.1f) and %.1f (%.1f/%.1f/%.1f); %d pairs, %zu mismatched",
              a.wer_percent(), a.sub_rate(), a.del_rate(), a.ins_rate(), b.wer_percent(),
              b.sub_rate(), b.del_rate(), b.ins_rate(), pairs, mismatched)};
}

// 12. Speed perturbation length and pitch.
Outcome speed_perturbation() {
  std::mt19937_64 rng(112);
  std::normal_distribution<double> d(0.0, 0.1);
  long worst_len = 0;
  for (std::size_t n : {1000u, 16000u, 23456u}) {
    Waveform w;
    w.samples.resize(n);
    for (double& s : w.samples) s = d(rng);
    for (double factor : {0.9, 1.0, 1.1, 0.7, 1.5}) {
      const auto out = frontend::speed_perturb(w, factor);
      worst_len = std::max(worst_len, std::labs(static_cast<long>(out.samples.size()) -
                                                std::lround(static_cast<double>(n) / factor)));
    }
  }
  Waveform tone;
  tone.samples = oracle::sine(440.0, 16000, 16000);
  const auto fast = frontend::speed_perturb(tone, 1.1);
  const std::size_t m = fast.samples.size();
  const double bin_hz = 16000.0 / static_cast<double>(m);
  std::size_t best = 0;
  double best_power = -1.0;
  for (auto k = static_cast<std::size_t>(300 / bin_hz); k < 700 / bin_hz; ++k) {
    const double p = oracle::dft_power(fast.samples, m, k);
    if (p > best_power) best_power = p, best = k;
  }
  const double peak_hz = static_cast<double>(best) * bin_hz;
  return {worst_len <= 1 && std::abs(peak_hz - 484.0) <= bin_hz,
          fmt("max length error %ld samples; 440 Hz x1.1 peak %.2f Hz (bin %.2f Hz)", worst_len,
              peak_hz, bin_hz)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"ctc_oracle", ctc_oracle},
      {"gradient_check", gradients},
      {"conformer_structure", conformer_structure},
      {"joint_loss_decode", joint_arithmetic},
      {"mask_ratio_law", ratio_law},
      {"fill_correctness", fill_correctness},
      {"determinism_jobs", determinism},
      {"cmvn", cmvn},
      {"mfcc_framing", mfcc_framing},
      {"duration_stats", duration_stats},
      {"wer_identity", wer_identity},
      {"speed_perturbation", speed_perturbation},
  };
  int failures = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.ok;
    std::printf("%s %2d %-20s %s\n", o.ok ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
