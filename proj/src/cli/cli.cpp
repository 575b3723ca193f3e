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
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "redmask/align.hpp"
#include "redmask/cli.hpp"
#include "redmask/error.hpp"
#include "redmask/io.hpp"
#include "redmask/kernel.hpp"

namespace redmask::cli {
namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config_path;
  std::string wav_dir, out, speeds;
  bool cmvn = false;
  int jobs = 1;

  std::string ctm;
  double shift_ms = 10.0;

  std::string feats, method, fill, plan_log, vocab, preset;
  double ratio = 0.15;
  std::uint64_t seed = 0;
  int freq_width = 0, freq_masks = 0, time_width = 0, time_masks = 0;

  std::string wav, ctm_out;
  double factor = 1.0;

  std::string ref, hyp, unit;
  bool detail = false;
};

std::string require_path(const std::optional<std::string>& value,
                         const char* flag, const std::string& why = "") {
  if (!value || value->empty()) {
    throw UsageError(std::string(flag) + " is required" + why);
  }
  return *value;
}

void log_config(const PipelineConfig& cfg, std::ostream& err) {
  err << "resolved config: " << dump_config(cfg) << '\n';
}

std::string speed_prefix(double factor) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sp%g-", factor);
  return buf;
}

// Runs fn(i) for i in [0, n) on `jobs` threads; rethrows the first failure in
// index order.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  std::vector<std::exception_ptr> errors(n);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) guarded(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int run_featize(const PipelineConfig& cfg, std::ostream& err) {
  const fs::path wav_dir = require_path(cfg.wav_dir, "--wav-dir");
  const fs::path out = require_path(cfg.out, "--out");
  cfg.mfcc.validate();
  for (double f : cfg.speeds) frontend::check_speed_factor(f);
  if (!fs::is_directory(wav_dir)) {
    throw DataError("featize: " + wav_dir.string() + " is not a directory");
  }
  std::vector<fs::path> wavs;
  for (const auto& entry : fs::directory_iterator(wav_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      wavs.push_back(entry.path());
    }
  }
  std::sort(wavs.begin(), wavs.end());

  struct Task {
    const fs::path* wav;
    double factor;
  };
  std::vector<Task> tasks;
  for (const auto& w : wavs) {
    for (double f : cfg.speeds) tasks.push_back({&w, f});
  }
  std::vector<FeatureMatrix> results(tasks.size());
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
    thread_local std::unique_ptr<frontend::MfccExtractor> extractor;
    if (!extractor || extractor->config() != cfg.mfcc) {
      extractor = std::make_unique<frontend::MfccExtractor>(cfg.mfcc);
    }
    const Task& task = tasks[i];
    const std::string stem = task.wav->stem().string();
    Waveform wave = io::read_wav(*task.wav);
    if (task.factor != 1.0) wave = frontend::speed_perturb(wave, task.factor);
    const std::string id = task.factor == 1.0 ? stem : speed_prefix(task.factor) + stem;
    FeatureMatrix f = extractor->compute(wave, id);
    results[i] = cfg.cmvn ? frontend::apply_cmvn(f) : std::move(f);
  });

  FeatureArchive archive;
  for (auto& f : results) archive.add(std::move(f));
  io::write_feature_archive(archive, out);
  err << "featize: wrote " << archive.size() << " utterance(s) to " << out.string()
      << '\n';
  return 0;
}

int run_stats(const PipelineConfig& cfg, double shift_ms, std::ostream& out) {
  const fs::path ctm = require_path(cfg.ctm, "--ctm");
  const auto alignments = io::read_ctm(ctm, shift_ms);
  const auto stats = align::duration_stats(alignments, shift_ms);
  char buf[160];
  out << "phone\tcount\tmean_sec\tmin_sec\tmax_sec\n";
  for (const auto& [phone, d] : stats.per_phone) {
    std::snprintf(buf, sizeof(buf), "\t%zu\t%.4f\t%.4f\t%.4f\n", d.count,
                  d.mean_sec, d.min_sec, d.max_sec);
    out << phone << buf;
  }
  std::snprintf(buf, sizeof(buf), "*\t%zu\t%.4f\t%.4f\t%.4f\n", stats.total_count,
                stats.overall_mean_sec, stats.overall_min_sec,
                stats.overall_max_sec);
  out << buf;
  std::snprintf(buf, sizeof(buf), "short_phone_ratio\t%.4f\n",
                stats.short_phone_ratio);
  out << buf;
  return 0;
}

int run_augment(const PipelineConfig& cfg, std::ostream& err) {
  const fs::path feats = require_path(cfg.feats, "--feats");
  const fs::path out = require_path(cfg.out, "--out");
  const mask::MaskConfig& mc = cfg.mask;
  mc.validate();
  const std::string method(mask::method_name(mc.method));

  std::vector<align::UttAlignment> alignments;
  if (mc.method != mask::Method::SpecAugment) {
    const fs::path ctm = require_path(cfg.ctm, "--ctm", " for method " + method);
    alignments = io::read_ctm(ctm, cfg.mfcc.frame_shift_ms);
  }
  std::optional<WordPieceVocab> vocab;
  if (mc.method == mask::Method::WordPieceMask) {
    vocab = io::read_vocab(fs::path(require_path(cfg.vocab, "--vocab", " for method wpm")));
  }

  const FeatureArchive archive = io::read_feature_archive(feats);
  const auto result = mask::augment_corpus(archive, alignments,
                                           vocab ? &*vocab : nullptr, mc, cfg.jobs);
  io::write_feature_archive(result.archive, out);
  if (cfg.plan_log) {
    io::write_file_atomic(*cfg.plan_log, mask::format_plan_log(result.plans));
  }
  std::size_t regions = 0;
  for (const auto& p : result.plans) regions += p.regions.size();
  err << "augment: " << method << " masked " << regions << " region(s) over "
      << result.archive.size() << " utterance(s)\n";
  return 0;
}

int run_perturb(const Flags& f, std::ostream& err) {
  if (f.wav.empty()) throw UsageError("--wav is required");
  if (f.out.empty()) throw UsageError("--out is required");
  if (!f.ctm.empty() && f.ctm_out.empty()) {
    throw UsageError("--ctm-out is required with --ctm");
  }
  frontend::check_speed_factor(f.factor);
  const Waveform wave = io::read_wav(f.wav);
  io::write_wav(frontend::speed_perturb(wave, f.factor), f.out);
  if (!f.ctm.empty()) {
    auto alignments = io::read_ctm(fs::path(f.ctm), f.shift_ms);
    for (auto& a : alignments) a = frontend::scale_alignment(a, f.factor);
    std::ostringstream ss;
    io::write_ctm(alignments, ss);
    io::write_file_atomic(f.ctm_out, ss.str());
  }
  err << "perturb: factor " << f.factor << " -> " << f.out << '\n';
  return 0;
}

int run_score(const PipelineConfig& cfg, bool detail, std::ostream& out) {
  const fs::path ref = require_path(cfg.ref, "--ref");
  const fs::path hyp = require_path(cfg.hyp, "--hyp");
  const auto refs = score::read_trn(ref, cfg.score_unit);
  const auto hyps = score::read_trn(hyp, cfg.score_unit);
  const auto report = score::score_corpus(refs, hyps);
  out << score::format_summary(report);
  if (detail) out << score::format_detail(report);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"redmask: alignment-aware feature masking toolkit"};
  app.require_subcommand(1);
  Flags f;

  // Returns the --jobs option so an explicit value can override the config.
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config_path, "JSON pipeline config; flags win");
    return sub->add_option("--jobs", f.jobs, "worker threads")
        ->check(CLI::PositiveNumber);
  };

  auto* featize = app.add_subcommand("featize", "WAV directory -> MFCC archive");
  auto* o_featize_jobs = add_common(featize);
  auto* o_wav_dir = featize->add_option("--wav-dir", f.wav_dir);
  auto* o_featize_out = featize->add_option("--out", f.out);
  auto* o_cmvn = featize->add_flag("--cmvn", f.cmvn, "per-utterance CMVN");
  auto* o_speed = featize->add_option("--speed", f.speeds, "e.g. 0.9,1.0,1.1");

  auto* stats = app.add_subcommand("stats", "phone duration statistics (TSV)");
  auto* o_stats_ctm = stats->add_option("--ctm", f.ctm);
  stats->add_option("--shift-ms", f.shift_ms)->check(CLI::PositiveNumber);

  auto* augment = app.add_subcommand("augment", "mask a feature archive");
  auto* o_augment_jobs = add_common(augment);
  auto* o_feats = augment->add_option("--feats", f.feats);
  auto* o_ctm = augment->add_option("--ctm", f.ctm);
  auto* o_method = augment->add_option("--method", f.method, "pm|wpm|stm|specaugment");
  auto* o_ratio = augment->add_option("--ratio", f.ratio);
  auto* o_fill = augment->add_option("--fill", f.fill, "utt|word");
  auto* o_seed = augment->add_option("--seed", f.seed);
  auto* o_aug_out = augment->add_option("--out", f.out);
  auto* o_plan_log = augment->add_option("--plan-log", f.plan_log);
  auto* o_vocab = augment->add_option("--vocab", f.vocab);
  auto* o_preset = augment->add_option(
      "--preset", f.preset, "specaugment|stm|wpm|wpm20|pm|pm20|pm20-fw");
  auto* o_fw = augment->add_option("--freq-width", f.freq_width, "SpecAugment F");
  auto* o_fm = augment->add_option("--freq-masks", f.freq_masks, "SpecAugment mF");
  auto* o_tw = augment->add_option("--time-width", f.time_width, "SpecAugment Tmax");
  auto* o_tm = augment->add_option("--time-masks", f.time_masks, "SpecAugment mT");

  auto* perturb = app.add_subcommand("perturb", "speed-perturb a WAV (and its CTM)");
  perturb->add_option("--wav", f.wav);
  perturb->add_option("--factor", f.factor);
  perturb->add_option("--out", f.out);
  perturb->add_option("--ctm", f.ctm);
  perturb->add_option("--ctm-out", f.ctm_out);
  perturb->add_option("--shift-ms", f.shift_ms)->check(CLI::PositiveNumber);

  auto* score_cmd = app.add_subcommand("score", "WER with SUB/DEL/INS");
  add_common(score_cmd);
  auto* o_ref = score_cmd->add_option("--ref", f.ref);
  auto* o_hyp = score_cmd->add_option("--hyp", f.hyp);
  score_cmd->add_flag("--detail", f.detail, "per-utterance TSV");
  auto* o_unit = score_cmd->add_option("--unit", f.unit, "word|grapheme");

  auto* selftest = app.add_subcommand("kernel-selftest", "run numeric oracle checks");
  auto* o_st_seed = selftest->add_option("--seed", f.seed);

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }

  try {
    PipelineConfig cfg;
    if (!f.config_path.empty()) cfg = load_config(f.config_path);
    auto given = [](CLI::Option* o) { return o->count() > 0; };

    if (featize->parsed()) {
      if (given(o_wav_dir)) cfg.wav_dir = f.wav_dir;
      if (given(o_featize_out)) cfg.out = f.out;
      if (given(o_cmvn)) cfg.cmvn = f.cmvn;
      if (given(o_speed)) cfg.speeds = parse_speed_list(f.speeds);
      if (given(o_featize_jobs)) cfg.jobs = f.jobs;
      log_config(cfg, err);
      return run_featize(cfg, err);
    }
    if (stats->parsed()) {
      if (given(o_stats_ctm)) cfg.ctm = f.ctm;
      return run_stats(cfg, f.shift_ms, out);
    }
    if (augment->parsed()) {
      if (given(o_feats)) cfg.feats = f.feats;
      if (given(o_ctm)) cfg.ctm = f.ctm;
      if (given(o_aug_out)) cfg.out = f.out;
      if (given(o_plan_log)) cfg.plan_log = f.plan_log;
      if (given(o_vocab)) cfg.vocab = f.vocab;
      if (given(o_preset)) apply_preset(f.preset, cfg.mask);
      if (given(o_method)) cfg.mask.method = mask::parse_method(f.method);
      if (given(o_ratio)) cfg.mask.ratio = f.ratio;
      if (given(o_fill)) cfg.mask.fill = mask::parse_fill(f.fill);
      if (given(o_fw)) cfg.mask.spec.max_freq_width = f.freq_width;
      if (given(o_fm)) cfg.mask.spec.num_freq_masks = f.freq_masks;
      if (given(o_tw)) cfg.mask.spec.max_time_width = f.time_width;
      if (given(o_tm)) cfg.mask.spec.num_time_masks = f.time_masks;
      if (given(o_seed)) {
        cfg.seed = f.seed;
      } else if (!cfg.seed) {
        if (const char* env = std::getenv("REDMASK_SEED")) {
          try {
            cfg.seed = std::stoull(env);
          } catch (const std::exception&) {
            throw UsageError(std::string("REDMASK_SEED is not an integer: ") + env);
          }
        }
      }
      cfg.mask.seed = cfg.seed.value_or(0);
      if (given(o_augment_jobs)) cfg.jobs = f.jobs;
      log_config(cfg, err);
      return run_augment(cfg, err);
    }
    if (perturb->parsed()) return run_perturb(f, err);
    if (score_cmd->parsed()) {
      if (given(o_ref)) cfg.ref = f.ref;
      if (given(o_hyp)) cfg.hyp = f.hyp;
      if (given(o_unit)) {
        if (f.unit == "word") {
          cfg.score_unit = score::Unit::Word;
        } else if (f.unit == "grapheme") {
          cfg.score_unit = score::Unit::Grapheme;
        } else {
          throw UsageError("--unit must be word or grapheme");
        }
      }
      return run_score(cfg, f.detail, out);
    }
    if (selftest->parsed()) {
      const auto checks = kernel::run_selftest(given(o_st_seed) ? f.seed : 17);
      kernel::print_selftest(checks, out);
      return std::all_of(checks.begin(), checks.end(),
                         [](const auto& c) { return c.ok(); })
                 ? 0
                 : 1;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace redmask::cli
