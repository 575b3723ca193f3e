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
#include <exception>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "redmask/error.hpp"
#include "redmask/mask.hpp"

namespace redmask::mask {

AugmentResult augment_corpus(const FeatureArchive& archive,
                             std::span<const align::UttAlignment> alignments,
                             const WordPieceVocab* vocab,
                             const MaskConfig& config, int jobs) {
  config.validate();
  if (config.method == Method::WordPieceMask && vocab == nullptr) {
    throw UsageError("mask: wpm requires a vocabulary");
  }
  const bool needs_alignment = config.method != Method::SpecAugment;

  std::unordered_map<std::string_view, const align::UttAlignment*> by_id;
  for (const auto& a : alignments) by_id.emplace(a.utt_id, &a);

  const std::size_t n = archive.size();
  std::vector<const align::UttAlignment*> matched(n, nullptr);
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = by_id.find(archive[i].utt_id);
    if (it != by_id.end()) {
      matched[i] = it->second;
    } else if (needs_alignment) {
      missing.push_back(archive[i].utt_id);
    }
  }
  if (!missing.empty()) {
    std::string ids;
    for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
    throw DataError("mask: missing alignment for " + std::to_string(missing.size()) +
                    " utterance(s): " + ids);
  }

  std::vector<FeatureMatrix> masked(n);
  std::vector<MaskPlan> plans(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](std::size_t i) {
    try {
      const FeatureMatrix& f = archive[i];
      if (needs_alignment) {
        align::validate_alignment(*matched[i], static_cast<int>(f.num_frames()));
      }
      plans[i] = plan_utterance(f, matched[i], vocab, config);
      masked[i] = apply_mask(f, plans[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, 256));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) work(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  AugmentResult result;
  for (auto& f : masked) result.archive.add(std::move(f));
  result.plans = std::move(plans);
  return result;
}

std::string format_plan_log(std::span<const MaskPlan> plans) {
  std::ostringstream out;
  out << "utt_id\tmethod\tstart_frame\tend_frame\td0\td1\tfill_kind\n";
  for (const MaskPlan& p : plans) {
    for (const MaskRegion& r : p.regions) {
      out << p.utt_id << '\t' << method_name(p.config.method) << '\t'
          << r.start_frame << '\t' << r.end_frame << '\t' << r.d0 << '\t' << r.d1
          << '\t' << fill_kind_name(r.fill_kind) << '\n';
    }
  }
  return out.str();
}

}  // namespace redmask::mask
