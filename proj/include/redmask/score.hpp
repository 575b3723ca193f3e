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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace redmask::score {

enum class EditOp { Match, Substitution, Deletion, Insertion };

struct EditAlignment {
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::vector<EditOp> path;

  std::size_t errors() const noexcept {
    return substitutions + deletions + insertions;
  }
};

// Minimum unit-cost Levenshtein alignment. Among optimal paths the most
// matches win; remaining ties are broken step by step from the left,
// preferring match, then substitution, deletion, insertion.
EditAlignment align_edit(std::span<const std::string> ref,
                         std::span<const std::string> hyp);

enum class Unit { Word, Grapheme };

struct Transcript {
  std::string utt_id;
  std::vector<std::string> tokens;
};

// `utt_id<TAB>token token ...` per line (a space also ends the id). Grapheme units split each word
// into graphemes.
std::vector<Transcript> read_trn(std::istream& in, Unit unit = Unit::Word);
std::vector<Transcript> read_trn(const std::filesystem::path& path,
                                 Unit unit = Unit::Word);

struct UttScore {
  std::string utt_id;
  std::size_t ref_tokens = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  bool missing_hyp = false;
};

struct ScoreReport {
  std::size_t ref_tokens = 0;  // N
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::vector<UttScore> utterances;

  std::size_t errors() const noexcept {
    return substitutions + deletions + insertions;
  }
  double wer_percent() const;
  double sub_rate() const;
  double del_rate() const;
  double ins_rate() const;
};

// Reference utterances drive the report; a missing hypothesis counts as all
// deletions and is flagged. Throws DataError for an empty reference or a
// hypothesis without a reference.
ScoreReport score_corpus(std::span<const Transcript> refs,
                         std::span<const Transcript> hyps);

// Header and one row, one decimal: WER SUB DEL INS.
std::string format_summary(const ScoreReport& report);
// utt_id N S D I WER flag, tab separated, with header.
std::string format_detail(const ScoreReport& report);

}  // namespace redmask::score
