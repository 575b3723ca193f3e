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
#include <limits>
#include <ostream>
#include <random>

#include "redmask/kernel.hpp"

namespace redmask::kernel {
namespace {

Matrix random_lattice(std::size_t frames, std::size_t vocab, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.5);
  Matrix logits(frames, vocab);
  for (double& v : logits.values()) v = n(rng);
  return log_softmax_rows(logits);
}

// Sums every path of the lattice whose collapse equals the labels.
double brute_force_ctc(const Matrix& lattice, const std::vector<int>& labels) {
  const std::size_t frames = lattice.rows();
  const std::size_t vocab = lattice.cols();
  std::vector<std::size_t> path(frames, 0);
  double total = 0.0;
  for (;;) {
    std::vector<int> collapsed;
    int prev = -1;
    double logp = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      const int k = static_cast<int>(path[t]);
      logp += lattice(t, path[t]);
      if (k != prev && k != 0) collapsed.push_back(k);
      prev = k;
    }
    if (collapsed == labels) total += std::exp(logp);
    std::size_t t = 0;
    while (t < frames && ++path[t] == vocab) path[t++] = 0;
    if (t == frames) break;
  }
  return total > 0 ? -std::log(total) : std::numeric_limits<double>::infinity();
}

std::vector<std::vector<int>> label_sets(int vocab) {
  std::vector<std::vector<int>> sets{{}};
  for (int a = 1; a < vocab; ++a) {
    sets.push_back({a});
    for (int b = 1; b < vocab; ++b) sets.push_back({a, b});
  }
  return sets;
}

double relative_error(std::span<const double> analytic,
                      std::span<const double> numeric) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    scale = std::max({scale, std::abs(analytic[i]), std::abs(numeric[i])});
  }
  return scale > 0 ? diff / scale : diff;
}

SelftestCheck check_ctc_brute_force(std::mt19937_64& rng) {
  SelftestCheck c{"ctc_vs_brute_force"};
  for (int reps = 0; reps < 12; ++reps) {
    for (std::size_t frames = 1; frames <= 5; ++frames) {
      for (int vocab = 2; vocab <= 3; ++vocab) {
        const Matrix lat = random_lattice(frames, static_cast<std::size_t>(vocab), rng);
        for (const auto& labels : label_sets(vocab)) {
          ++c.total;
          const CtcResult r = ctc_loss(lat, labels);
          const double oracle = brute_force_ctc(lat, labels);
          if (std::isinf(oracle)) {
            c.passed += !r.feasible ? 1 : 0;
          } else if (r.feasible && std::abs(r.loss - oracle) <= 1e-8) {
            ++c.passed;
          }
        }
      }
    }
  }
  return c;
}

SelftestCheck check_ctc_gradient(std::mt19937_64& rng) {
  SelftestCheck c{"ctc_gradient_vs_finite_difference"};
  const double h = 1e-5;
  for (int i = 0; i < 50; ++i) {
    const std::size_t frames = 3 + static_cast<std::size_t>(i % 3);
    Matrix lat = random_lattice(frames, 3, rng);
    const std::vector<int> labels = i % 2 ? std::vector<int>{1, 2} : std::vector<int>{2};
    const Matrix grad = ctc_gradient(lat, labels);
    std::vector<double> numeric(grad.values().size());
    for (std::size_t j = 0; j < numeric.size(); ++j) {
      double& v = lat.values()[j];
      const double saved = v;
      v = saved + h;
      const double up = ctc_loss(lat, labels).loss;
      v = saved - h;
      const double down = ctc_loss(lat, labels).loss;
      v = saved;
      numeric[j] = (up - down) / (2 * h);
    }
    ++c.total;
    if (relative_error(grad.values(), numeric) < 1e-5) ++c.passed;
  }
  return c;
}

SelftestCheck check_cross_entropy(std::mt19937_64& rng) {
  SelftestCheck c{"cross_entropy_vs_naive_and_gradient"};
  std::normal_distribution<double> n(0.0, 2.0);
  const double h = 1e-5;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> logits(3 + static_cast<std::size_t>(i % 4));
    for (double& v : logits) v = n(rng);
    const int target = i % static_cast<int>(logits.size());
    double z = 0.0;
    for (double v : logits) z += std::exp(v);
    const double naive = -std::log(std::exp(logits[static_cast<std::size_t>(target)]) / z);
    const auto grad = cross_entropy_gradient(logits, target);
    std::vector<double> numeric(logits.size());
    for (std::size_t j = 0; j < logits.size(); ++j) {
      const double saved = logits[j];
      logits[j] = saved + h;
      const double up = cross_entropy(logits, target);
      logits[j] = saved - h;
      const double down = cross_entropy(logits, target);
      logits[j] = saved;
      numeric[j] = (up - down) / (2 * h);
    }
    ++c.total;
    if (std::abs(cross_entropy(logits, target) - naive) <= 1e-12 &&
        relative_error(grad, numeric) < 1e-5) {
      ++c.passed;
    }
  }
  return c;
}

SelftestCheck check_conformer_structure(std::mt19937_64& rng) {
  SelftestCheck c{"conformer_residual_structure"};
  std::normal_distribution<double> n(0.0, 1.0);
  const int d = 8;
  for (int i = 0; i < 10; ++i) {
    Matrix x(5, d);
    for (double& v : x.values()) v = n(rng);

    KernelParams p = KernelParams::zeros(d, 2, 16, 3);
    const Matrix y = conformer_block(x, p);
    double err = 0.0;
    for (std::size_t t = 0; t < x.rows(); ++t) {
      const auto ref = layer_norm(x.row(t), p.norm_gamma, p.norm_beta);
      for (std::size_t k = 0; k < ref.size(); ++k) {
        err = std::max(err, std::abs(y(t, k) - ref[k]));
      }
    }
    ++c.total;
    if (err <= 1e-12) ++c.passed;

    std::vector<double> constant(d);
    for (double& v : constant) v = n(rng);
    p.ffn1.down.bias = constant;
    const Matrix yc = conformer_block(x, p);
    err = 0.0;
    for (std::size_t t = 0; t < x.rows(); ++t) {
      std::vector<double> shifted(d);
      for (int k = 0; k < d; ++k) shifted[k] = x(t, k) + 0.5 * constant[k];
      const auto ref = layer_norm(shifted, p.norm_gamma, p.norm_beta);
      for (int k = 0; k < d; ++k) err = std::max(err, std::abs(yc(t, k) - ref[k]));
    }
    ++c.total;
    if (err <= 1e-12) ++c.passed;
  }
  return c;
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<SelftestCheck> checks;
  checks.push_back(check_ctc_brute_force(rng));
  checks.push_back(check_ctc_gradient(rng));
  checks.push_back(check_cross_entropy(rng));
  checks.push_back(check_conformer_structure(rng));
  SelftestCheck arith{"joint_loss_and_decode_presets"};
  arith.total = 2;
  arith.passed = (joint_loss(1.0, 2.0) == 1.3) + (joint_decode_score(-1.0, -3.0) == -2.0);
  checks.push_back(arith);
  return checks;
}

void print_selftest(std::span<const SelftestCheck> checks, std::ostream& out) {
  std::size_t failed = 0;
  for (const auto& c : checks) {
    out << (c.ok() ? "PASS" : "FAIL") << '\t' << c.name << '\t' << c.passed << '/'
        << c.total << '\n';
    failed += c.ok() ? 0 : 1;
  }
  out << (failed == 0 ? "all checks passed" : "some checks failed") << '\n';
}

}  // namespace redmask::kernel
