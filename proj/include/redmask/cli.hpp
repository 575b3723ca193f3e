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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "redmask/frontend.hpp"
#include "redmask/mask.hpp"
#include "redmask/score.hpp"

namespace redmask::cli {

// Every knob of the pipeline in one document. Loaded from JSON with unknown
// keys rejected; command-line flags override it.
struct PipelineConfig {
  frontend::MfccConfig mfcc;
  mask::MaskConfig mask;
  score::Unit score_unit = score::Unit::Word;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool cmvn = false;
  std::vector<double> speeds{1.0};

  std::optional<std::string> wav_dir, feats, ctm, vocab, out, plan_log, ref, hyp;
};

// Throws UsageError on unknown keys or wrongly typed values.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text);
std::string dump_config(const PipelineConfig& config);

// Applies a named configuration: specaugment, stm, wpm, wpm20, pm, pm20,
// pm20-fw. Throws UsageError for unknown names.
void apply_preset(const std::string& name, mask::MaskConfig& config);

// Parses "0.9,1.0,1.1".
std::vector<double> parse_speed_list(const std::string& text);

// Runs one subcommand. Exit codes: 0 success, 1 data error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace redmask::cli
