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

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "redmask/cli.hpp"
#include "redmask/error.hpp"

namespace redmask::cli {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw UsageError("config: " + where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw UsageError("config: unknown key '" + where + key + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw UsageError("config: bad value for '" + where + key + "'");
  }
}

void read_path(const json& obj, const char* key, std::optional<std::string>& out) {
  if (!obj.contains(key)) return;
  std::string v;
  read(obj, key, v, "");
  out = v;
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  reject_unknown(doc,
                 {"seed", "jobs", "cmvn", "speeds", "mfcc", "mask", "score",
                  "wav_dir", "feats", "ctm", "vocab", "out", "plan_log", "ref",
                  "hyp"},
                 "");
  PipelineConfig cfg;
  if (doc.contains("seed")) {
    std::uint64_t seed = 0;
    read(doc, "seed", seed, "");
    cfg.seed = seed;
  }
  read(doc, "jobs", cfg.jobs, "");
  read(doc, "cmvn", cfg.cmvn, "");
  read(doc, "speeds", cfg.speeds, "");
  const std::pair<const char*, std::optional<std::string>*> paths[] = {
      {"wav_dir", &cfg.wav_dir}, {"feats", &cfg.feats}, {"ctm", &cfg.ctm},
      {"vocab", &cfg.vocab},     {"out", &cfg.out},     {"plan_log", &cfg.plan_log},
      {"ref", &cfg.ref},         {"hyp", &cfg.hyp}};
  for (const auto& [key, slot] : paths) read_path(doc, key, *slot);

  if (doc.contains("mfcc")) {
    const json& m = doc["mfcc"];
    reject_unknown(m,
                   {"sample_rate", "frame_length_ms", "frame_shift_ms", "num_ceps",
                    "num_mel_filters", "fft_size", "preemphasis", "mel_low_hz",
                    "mel_high_hz", "log_floor"},
                   "mfcc.");
    auto& c = cfg.mfcc;
    read(m, "sample_rate", c.sample_rate, "mfcc.");
    read(m, "frame_length_ms", c.frame_length_ms, "mfcc.");
    read(m, "frame_shift_ms", c.frame_shift_ms, "mfcc.");
    read(m, "num_ceps", c.num_ceps, "mfcc.");
    read(m, "num_mel_filters", c.num_mel_filters, "mfcc.");
    read(m, "fft_size", c.fft_size, "mfcc.");
    read(m, "preemphasis", c.preemphasis, "mfcc.");
    read(m, "mel_low_hz", c.mel_low_hz, "mfcc.");
    read(m, "mel_high_hz", c.mel_high_hz, "mfcc.");
    read(m, "log_floor", c.log_floor, "mfcc.");
  }

  if (doc.contains("mask")) {
    const json& m = doc["mask"];
    reject_unknown(m, {"preset", "method", "ratio", "fill", "spec"}, "mask.");
    if (m.contains("preset")) {
      std::string preset;
      read(m, "preset", preset, "mask.");
      apply_preset(preset, cfg.mask);
    }
    if (m.contains("method")) {
      std::string method;
      read(m, "method", method, "mask.");
      cfg.mask.method = mask::parse_method(method);
    }
    read(m, "ratio", cfg.mask.ratio, "mask.");
    if (m.contains("fill")) {
      std::string fill;
      read(m, "fill", fill, "mask.");
      cfg.mask.fill = mask::parse_fill(fill);
    }
    if (m.contains("spec")) {
      const json& s = m["spec"];
      reject_unknown(s,
                     {"max_freq_width", "num_freq_masks", "max_time_width",
                      "num_time_masks"},
                     "mask.spec.");
      auto& sp = cfg.mask.spec;
      read(s, "max_freq_width", sp.max_freq_width, "mask.spec.");
      read(s, "num_freq_masks", sp.num_freq_masks, "mask.spec.");
      read(s, "max_time_width", sp.max_time_width, "mask.spec.");
      read(s, "num_time_masks", sp.num_time_masks, "mask.spec.");
    }
  }

  if (doc.contains("score")) {
    const json& s = doc["score"];
    reject_unknown(s, {"unit"}, "score.");
    std::string unit = "word";
    read(s, "unit", unit, "score.");
    if (unit == "word") {
      cfg.score_unit = score::Unit::Word;
    } else if (unit == "grapheme") {
      cfg.score_unit = score::Unit::Grapheme;
    } else {
      throw UsageError("config: score.unit must be word or grapheme");
    }
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const PipelineConfig& cfg) {
  json doc;
  if (cfg.seed) doc["seed"] = *cfg.seed;
  doc["jobs"] = cfg.jobs;
  doc["cmvn"] = cfg.cmvn;
  doc["speeds"] = cfg.speeds;
  const auto& c = cfg.mfcc;
  doc["mfcc"] = {{"sample_rate", c.sample_rate},
                 {"frame_length_ms", c.frame_length_ms},
                 {"frame_shift_ms", c.frame_shift_ms},
                 {"num_ceps", c.num_ceps},
                 {"num_mel_filters", c.num_mel_filters},
                 {"fft_size", c.fft_size},
                 {"preemphasis", c.preemphasis},
                 {"mel_low_hz", c.mel_low_hz},
                 {"mel_high_hz", c.mel_high_resolved()},
                 {"log_floor", c.log_floor}};
  const auto& m = cfg.mask;
  doc["mask"] = {
      {"method", std::string(mask::method_name(m.method))},
      {"ratio", m.ratio},
      {"fill", m.fill == mask::FillStrategy::WordMean ? "word" : "utt"},
      {"spec",
       {{"max_freq_width", m.spec.max_freq_width},
        {"num_freq_masks", m.spec.num_freq_masks},
        {"max_time_width", m.spec.max_time_width},
        {"num_time_masks", m.spec.num_time_masks}}}};
  doc["score"] = {{"unit", cfg.score_unit == score::Unit::Word ? "word" : "grapheme"}};
  const std::pair<const char*, const std::optional<std::string>*> paths[] = {
      {"wav_dir", &cfg.wav_dir}, {"feats", &cfg.feats}, {"ctm", &cfg.ctm},
      {"vocab", &cfg.vocab},     {"out", &cfg.out},     {"plan_log", &cfg.plan_log},
      {"ref", &cfg.ref},         {"hyp", &cfg.hyp}};
  for (const auto& [key, value] : paths) {
    if (*value) doc[key] = **value;
  }
  return doc.dump();
}

void apply_preset(const std::string& name, mask::MaskConfig& config) {
  using mask::FillStrategy;
  using mask::Method;
  struct Preset {
    const char* name;
    Method method;
    double ratio;
    FillStrategy fill;
  };
  static constexpr Preset presets[] = {
      {"specaugment", Method::SpecAugment, 0.15, FillStrategy::UtteranceMean},
      {"stm", Method::WordMask, 0.15, FillStrategy::UtteranceMean},
      {"wpm", Method::WordPieceMask, 0.15, FillStrategy::UtteranceMean},
      {"wpm20", Method::WordPieceMask, 0.20, FillStrategy::UtteranceMean},
      {"pm", Method::PhoneMask, 0.15, FillStrategy::UtteranceMean},
      {"pm20", Method::PhoneMask, 0.20, FillStrategy::UtteranceMean},
      {"pm20-fw", Method::PhoneMask, 0.20, FillStrategy::WordMean},
  };
  for (const Preset& p : presets) {
    if (name == p.name) {
      config.method = p.method;
      config.ratio = p.ratio;
      config.fill = p.fill;
      return;
    }
  }
  throw UsageError("unknown preset '" + name +
                   "' (expected specaugment|stm|wpm|wpm20|pm|pm20|pm20-fw)");
}

std::vector<double> parse_speed_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--speed: bad factor '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--speed: empty list");
  return out;
}

}  // namespace redmask::cli
