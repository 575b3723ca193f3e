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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "redmask/matrix.hpp"

namespace redmask::kernel {

inline constexpr double kDefaultAlpha = 0.7;   // CE weight in the joint loss
inline constexpr double kDefaultLambda = 0.5;  // CE weight in joint decoding

std::vector<double> layer_norm(std::span<const double> x,
                               std::span<const double> gamma,
                               std::span<const double> beta, double eps = 1e-5);

// y = W x + b with W stored out x in.
struct Linear {
  Matrix weight;
  std::vector<double> bias;

  static Linear zeros(std::size_t in, std::size_t out);
  std::size_t in_dim() const noexcept { return weight.cols(); }
  std::size_t out_dim() const noexcept { return weight.rows(); }
  void apply(std::span<const double> in, std::span<double> out) const;
  Matrix apply_rows(const Matrix& x) const;
};

// Linear -> ReLU -> Linear.
struct FeedForward {
  Linear up;
  Linear down;
};

// Standard multi-head scaled dot-product self-attention, no positional
// encoding.
struct SelfAttention {
  int num_heads = 1;
  Linear query, key, value, output;
};

// Pointwise (d -> 2d) -> GLU -> depthwise over time (same padding) -> ReLU
// -> pointwise (d -> d). No batch norm.
struct ConvModule {
  Linear pointwise_in;
  Matrix depthwise;  // d x kernel
  std::vector<double> depthwise_bias;
  Linear pointwise_out;
};

struct KernelParams {
  int d_model = 0;
  int num_heads = 1;
  int ffn_hidden = 0;
  int conv_kernel = 15;
  FeedForward ffn1;
  SelfAttention mhsa;
  ConvModule conv;
  FeedForward ffn2;
  std::vector<double> norm_gamma;
  std::vector<double> norm_beta;
  double alpha = kDefaultAlpha;
  double lambda = kDefaultLambda;

  // All weights zero, gamma = 1, beta = 0.
  static KernelParams zeros(int d_model, int num_heads, int ffn_hidden,
                            int conv_kernel = 15);
  // Gaussian weights with standard deviation `scale`.
  static KernelParams random(int d_model, int num_heads, int ffn_hidden,
                             int conv_kernel, std::uint64_t seed,
                             double scale = 0.1);
  // Throws std::invalid_argument on inconsistent shapes or weights.
  void validate() const;
};

Matrix feed_forward(const Matrix& x, const FeedForward& ffn);
Matrix self_attention(const Matrix& x, const SelfAttention& attn);
Matrix conv_module(const Matrix& x, const ConvModule& conv);

// x'   = x + FFN1(x)/2
// x''  = x' + MHSA(x')
// x''' = x'' + Conv(x'')
// y    = LayerNorm(x''' + FFN2(x''')/2)
// Throws std::invalid_argument on a shape mismatch.
Matrix conformer_block(const Matrix& x, const KernelParams& params);

// Row-wise log-softmax; turns logits into a log-probability lattice.
Matrix log_softmax_rows(const Matrix& logits);
// Every row log-sum-exps to 0 within tol.
bool is_log_prob_lattice(const Matrix& lattice, double tol = 1e-6);

struct CtcResult {
  double loss = 0.0;  // -log P(labels | lattice); +inf when infeasible
  bool feasible = true;
};

// Forward DP over the blank-extended labels in the log domain. Blank is
// index 0; labels must lie in [1, V). The lattice entries are used as given
// (rows need not be normalized).
CtcResult ctc_loss(const Matrix& lattice, std::span<const int> labels);

// d loss / d lattice(t, k). Zero matrix when infeasible.
Matrix ctc_gradient(const Matrix& lattice, std::span<const int> labels);

// Minimum frames CTC needs for labels (one blank between repeats).
std::size_t ctc_min_frames(std::span<const int> labels);

// -log softmax(logits)[target], with max subtraction.
double cross_entropy(std::span<const double> logits, int target);
std::vector<double> cross_entropy_gradient(std::span<const double> logits,
                                           int target);

// alpha * ce + (1 - alpha) * ctc, both as negative log-likelihoods.
double joint_loss(double loss_ce, double loss_ctc, double alpha = kDefaultAlpha);
// lambda * log P_ce + (1 - lambda) * log P_ctc.
double joint_decode_score(double logp_ce, double logp_ctc,
                          double lambda = kDefaultLambda);

struct Hypothesis {
  std::vector<int> tokens;
  double logp_ce = 0.0;
  double logp_ctc = 0.0;
};

// Index of the highest joint score; the first one wins ties.
std::size_t best_hypothesis(std::span<const Hypothesis> hyps,
                            double lambda = kDefaultLambda);

// Per-frame argmax, collapse repeats, drop blanks.
std::vector<int> greedy_ctc_decode(const Matrix& lattice);

struct SelftestCheck {
  std::string name;
  std::size_t passed = 0;
  std::size_t total = 0;
  bool ok() const noexcept { return passed == total; }
};

// Oracle comparisons: CTC vs brute-force path enumeration, CE vs naive
// softmax, finite-difference gradients, Conformer residual structure.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed = 17);
void print_selftest(std::span<const SelftestCheck> checks, std::ostream& out);

}  // namespace redmask::kernel
