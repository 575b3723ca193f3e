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

#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <unordered_map>

#include "redmask/error.hpp"
#include "redmask/score.hpp"
#include "redmask/tokenize.hpp"

namespace redmask::score {

EditAlignment align_edit(std::span<const std::string> ref,
                         std::span<const std::string> hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  // best(i, j) for ref[i:] against hyp[j:]: fewest edits, then most matches.
  struct Cost {
    std::size_t edits = 0;
    std::size_t matches = 0;
    bool operator==(const Cost&) const = default;
    bool better_than(const Cost& o) const {
      return edits != o.edits ? edits < o.edits : matches > o.matches;
    }
  };
  std::vector<Cost> cost((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cost& {
    return cost[i * (m + 1) + j];
  };
  auto step = [](Cost c, std::size_t edits, std::size_t matches) {
    return Cost{c.edits + edits, c.matches + matches};
  };
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      if (i == n) {
        at(i, j) = {m - j, 0};
      } else if (j == m) {
        at(i, j) = {n - i, 0};
      } else {
        const bool same = ref[i] == hyp[j];
        Cost best = step(at(i + 1, j + 1), same ? 0 : 1, same ? 1 : 0);
        for (Cost c : {step(at(i + 1, j), 1, 0), step(at(i, j + 1), 1, 0)}) {
          if (c.better_than(best)) best = c;
        }
        at(i, j) = best;
      }
    }
  }

  // Walk forward taking the first optimal step in preference order.
  EditAlignment out;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    const Cost here = at(i, j);
    if (i < n && j < m && ref[i] == hyp[j] && step(at(i + 1, j + 1), 0, 1) == here) {
      out.path.push_back(EditOp::Match);
      ++out.matches;
      ++i, ++j;
    } else if (i < n && j < m && ref[i] != hyp[j] &&
               step(at(i + 1, j + 1), 1, 0) == here) {
      out.path.push_back(EditOp::Substitution);
      ++out.substitutions;
      ++i, ++j;
    } else if (i < n && step(at(i + 1, j), 1, 0) == here) {
      out.path.push_back(EditOp::Deletion);
      ++out.deletions;
      ++i;
    } else {
      out.path.push_back(EditOp::Insertion);
      ++out.insertions;
      ++j;
    }
  }
  return out;
}

std::vector<Transcript> read_trn(std::istream& in, Unit unit) {
  std::vector<Transcript> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    // The id ends at the first tab or space.
    const auto tab = line.find_first_of(" \t");
    Transcript t;
    t.utt_id = line.substr(0, tab);
    if (t.utt_id.empty()) throw FormatError("trn: empty utt_id", line_no);
    if (tab != std::string::npos) {
      std::istringstream words(line.substr(tab + 1));
      for (std::string w; words >> w;) {
        if (unit == Unit::Word) {
          t.tokens.push_back(std::move(w));
        } else {
          for (auto& g : tokenize::graphemes(w)) t.tokens.push_back(std::move(g));
        }
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Transcript> read_trn(const std::filesystem::path& path, Unit unit) {
  std::ifstream in(path);
  if (!in) throw FormatError("trn: cannot open " + path.string());
  return read_trn(in, unit);
}

namespace {
double rate(std::size_t count, std::size_t n) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(n);
}
}  // namespace

double ScoreReport::wer_percent() const { return rate(errors(), ref_tokens); }
double ScoreReport::sub_rate() const { return rate(substitutions, ref_tokens); }
double ScoreReport::del_rate() const { return rate(deletions, ref_tokens); }
double ScoreReport::ins_rate() const { return rate(insertions, ref_tokens); }

ScoreReport score_corpus(std::span<const Transcript> refs,
                         std::span<const Transcript> hyps) {
  std::unordered_map<std::string, const Transcript*> hyp_by_id;
  for (const auto& h : hyps) {
    if (!hyp_by_id.emplace(h.utt_id, &h).second) {
      throw DataError("score: duplicate hypothesis '" + h.utt_id + "'");
    }
  }
  std::unordered_map<std::string, bool> ref_ids;
  ScoreReport report;
  for (const auto& r : refs) {
    if (!ref_ids.emplace(r.utt_id, true).second) {
      throw DataError("score: duplicate reference '" + r.utt_id + "'");
    }
    if (r.tokens.empty()) {
      throw DataError("score: reference '" + r.utt_id + "' has no tokens");
    }
    UttScore u;
    u.utt_id = r.utt_id;
    u.ref_tokens = r.tokens.size();
    auto it = hyp_by_id.find(r.utt_id);
    if (it == hyp_by_id.end()) {
      u.missing_hyp = true;
      u.deletions = r.tokens.size();
    } else {
      const EditAlignment a = align_edit(r.tokens, it->second->tokens);
      u.substitutions = a.substitutions;
      u.deletions = a.deletions;
      u.insertions = a.insertions;
    }
    report.ref_tokens += u.ref_tokens;
    report.substitutions += u.substitutions;
    report.deletions += u.deletions;
    report.insertions += u.insertions;
    report.utterances.push_back(std::move(u));
  }
  for (const auto& h : hyps) {
    if (!ref_ids.contains(h.utt_id)) {
      throw DataError("score: hypothesis '" + h.utt_id + "' has no reference");
    }
  }
  return report;
}

std::string format_summary(const ScoreReport& report) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "WER\tSUB\tDEL\tINS\n%.1f\t%.1f\t%.1f\t%.1f\n",
                report.wer_percent(), report.sub_rate(), report.del_rate(),
                report.ins_rate());
  return buf;
}

std::string format_detail(const ScoreReport& report) {
  std::ostringstream out;
  out << "utt_id\tN\tS\tD\tI\tWER\tflag\n";
  char buf[32];
  for (const auto& u : report.utterances) {
    std::snprintf(buf, sizeof(buf), "%.1f",
                  100.0 * static_cast<double>(u.substitutions + u.deletions +
                                              u.insertions) /
                      static_cast<double>(u.ref_tokens));
    out << u.utt_id << '\t' << u.ref_tokens << '\t' << u.substitutions << '\t'
        << u.deletions << '\t' << u.insertions << '\t' << buf << '\t'
        << (u.missing_hyp ? "missing_hyp" : "-") << '\n';
  }
  return out.str();
}

}  // namespace redmask::score
