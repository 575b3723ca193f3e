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
#include <stdexcept>
#include <string>

#include "redmask/kernel.hpp"

namespace redmask::kernel {
namespace {

void check_target(std::span<const double> logits, int target) {
  if (target < 0 || static_cast<std::size_t>(target) >= logits.size()) {
    throw std::invalid_argument("cross_entropy: target " + std::to_string(target) +
                                " out of range for " +
                                std::to_string(logits.size()) + " classes");
  }
}

double log_partition(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - mx);
  return mx + std::log(z);
}

}  // namespace

double cross_entropy(std::span<const double> logits, int target) {
  check_target(logits, target);
  return log_partition(logits) - logits[static_cast<std::size_t>(target)];
}

std::vector<double> cross_entropy_gradient(std::span<const double> logits,
                                           int target) {
  check_target(logits, target);
  const double lz = log_partition(logits);
  std::vector<double> grad(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) grad[i] = std::exp(logits[i] - lz);
  grad[static_cast<std::size_t>(target)] -= 1.0;
  return grad;
}

double joint_loss(double loss_ce, double loss_ctc, double alpha) {
  return alpha * loss_ce + (1.0 - alpha) * loss_ctc;
}

double joint_decode_score(double logp_ce, double logp_ctc, double lambda) {
  return lambda * logp_ce + (1.0 - lambda) * logp_ctc;
}

std::size_t best_hypothesis(std::span<const Hypothesis> hyps, double lambda) {
  if (hyps.empty()) throw std::invalid_argument("best_hypothesis: no hypotheses");
  std::size_t best = 0;
  double best_score = joint_decode_score(hyps[0].logp_ce, hyps[0].logp_ctc, lambda);
  for (std::size_t i = 1; i < hyps.size(); ++i) {
    const double s = joint_decode_score(hyps[i].logp_ce, hyps[i].logp_ctc, lambda);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

}  // namespace redmask::kernel
