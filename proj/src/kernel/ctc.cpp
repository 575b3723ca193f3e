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
#include <stdexcept>
#include <string>

#include "redmask/kernel.hpp"

namespace redmask::kernel {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Labels interleaved with blanks: b l1 b l2 ... lL b.
std::vector<int> extend_labels(std::span<const int> labels, std::size_t vocab) {
  std::vector<int> ext;
  ext.reserve(2 * labels.size() + 1);
  ext.push_back(0);
  for (int l : labels) {
    if (l <= 0 || static_cast<std::size_t>(l) >= vocab) {
      throw std::invalid_argument("ctc: label " + std::to_string(l) +
                                  " outside [1, " + std::to_string(vocab) + ")");
    }
    ext.push_back(l);
    ext.push_back(0);
  }
  return ext;
}

// A skip from s-2 to s is allowed when s is a label differing from s-2.
bool can_skip(const std::vector<int>& ext, std::size_t s) {
  return s >= 2 && ext[s] != 0 && ext[s] != ext[s - 2];
}

Matrix forward(const Matrix& y, const std::vector<int>& ext) {
  const std::size_t frames = y.rows();
  const std::size_t states = ext.size();
  Matrix alpha(frames, states, kNegInf);
  alpha(0, 0) = y(0, 0);
  if (states > 1) alpha(0, 1) = y(0, static_cast<std::size_t>(ext[1]));
  for (std::size_t t = 1; t < frames; ++t) {
    for (std::size_t s = 0; s < states; ++s) {
      double a = alpha(t - 1, s);
      if (s >= 1) a = log_add(a, alpha(t - 1, s - 1));
      if (can_skip(ext, s)) a = log_add(a, alpha(t - 1, s - 2));
      if (a != kNegInf) alpha(t, s) = a + y(t, static_cast<std::size_t>(ext[s]));
    }
  }
  return alpha;
}

Matrix backward(const Matrix& y, const std::vector<int>& ext) {
  const std::size_t frames = y.rows();
  const std::size_t states = ext.size();
  Matrix beta(frames, states, kNegInf);
  const std::size_t last = frames - 1;
  beta(last, states - 1) = y(last, 0);
  if (states > 1) {
    beta(last, states - 2) = y(last, static_cast<std::size_t>(ext[states - 2]));
  }
  for (std::size_t t = last; t-- > 0;) {
    for (std::size_t s = 0; s < states; ++s) {
      double b = beta(t + 1, s);
      if (s + 1 < states) b = log_add(b, beta(t + 1, s + 1));
      if (s + 2 < states && can_skip(ext, s + 2)) b = log_add(b, beta(t + 1, s + 2));
      if (b != kNegInf) beta(t, s) = b + y(t, static_cast<std::size_t>(ext[s]));
    }
  }
  return beta;
}

double total_log_prob(const Matrix& alpha) {
  const std::size_t last = alpha.rows() - 1;
  const std::size_t states = alpha.cols();
  double p = alpha(last, states - 1);
  if (states > 1) p = log_add(p, alpha(last, states - 2));
  return p;
}

void check_lattice(const Matrix& lattice) {
  if (lattice.rows() == 0 || lattice.cols() < 2) {
    throw std::invalid_argument("ctc: lattice needs T >= 1 and V >= 2");
  }
}

}  // namespace

std::size_t ctc_min_frames(std::span<const int> labels) {
  std::size_t n = labels.size();
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] == labels[i - 1]) ++n;
  }
  return n;
}

CtcResult ctc_loss(const Matrix& lattice, std::span<const int> labels) {
  check_lattice(lattice);
  const auto ext = extend_labels(labels, lattice.cols());
  if (lattice.rows() < ctc_min_frames(labels)) {
    return {std::numeric_limits<double>::infinity(), false};
  }
  const double logp = total_log_prob(forward(lattice, ext));
  if (logp == kNegInf) return {std::numeric_limits<double>::infinity(), false};
  return {-logp, true};
}

Matrix ctc_gradient(const Matrix& lattice, std::span<const int> labels) {
  check_lattice(lattice);
  const auto ext = extend_labels(labels, lattice.cols());
  Matrix grad(lattice.rows(), lattice.cols());
  if (lattice.rows() < ctc_min_frames(labels)) return grad;
  const Matrix alpha = forward(lattice, ext);
  const double logp = total_log_prob(alpha);
  if (logp == kNegInf) return grad;
  const Matrix beta = backward(lattice, ext);

  // Both alpha and beta include the emission at t, hence the extra -y.
  for (std::size_t t = 0; t < lattice.rows(); ++t) {
    for (std::size_t s = 0; s < ext.size(); ++s) {
      const double ab = alpha(t, s) + beta(t, s);
      if (ab == kNegInf) continue;
      const auto k = static_cast<std::size_t>(ext[s]);
      grad(t, k) -= std::exp(ab - lattice(t, k) - logp);
    }
  }
  return grad;
}

Matrix log_softmax_rows(const Matrix& logits) {
  Matrix out = logits;
  for (std::size_t t = 0; t < out.rows(); ++t) {
    auto row = out.row(t);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : row) mx = std::max(mx, v);
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    const double lz = mx + std::log(z);
    for (double& v : row) v -= lz;
  }
  return out;
}

bool is_log_prob_lattice(const Matrix& lattice, double tol) {
  for (std::size_t t = 0; t < lattice.rows(); ++t) {
    double acc = kNegInf;
    for (double v : lattice.row(t)) acc = log_add(acc, v);
    if (!(std::abs(acc) <= tol)) return false;
  }
  return true;
}

std::vector<int> greedy_ctc_decode(const Matrix& lattice) {
  std::vector<int> out;
  int prev = -1;
  for (std::size_t t = 0; t < lattice.rows(); ++t) {
    const auto row = lattice.row(t);
    const int best =
        static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    if (best != prev && best != 0) out.push_back(best);
    prev = best;
  }
  return out;
}

}  // namespace redmask::kernel
