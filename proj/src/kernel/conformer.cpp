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
#include <random>
#include <stdexcept>
#include <string>

#include "redmask/kernel.hpp"
#include "redmask/simd.hpp"

namespace redmask::kernel {
namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("conformer: " + what);
}

void check_linear(const Linear& l, std::size_t in, std::size_t out,
                  const char* name) {
  require(l.weight.rows() == out && l.weight.cols() == in && l.bias.size() == out,
          std::string(name) + " expects " + std::to_string(out) + "x" +
              std::to_string(in));
}

Linear random_linear(std::size_t in, std::size_t out, std::mt19937_64& rng,
                     double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Linear l = Linear::zeros(in, out);
  for (double& w : l.weight.values()) w = n(rng);
  for (double& b : l.bias) b = n(rng);
  return l;
}

}  // namespace

std::vector<double> layer_norm(std::span<const double> x,
                               std::span<const double> gamma,
                               std::span<const double> beta, double eps) {
  if (x.empty() || gamma.size() != x.size() || beta.size() != x.size()) {
    throw std::invalid_argument("layer_norm: dimension mismatch");
  }
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  const double inv = 1.0 / std::sqrt(var + eps);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = (x[i] - mean) * inv * gamma[i] + beta[i];
  }
  return y;
}

Linear Linear::zeros(std::size_t in, std::size_t out) {
  return {Matrix(out, in), std::vector<double>(out, 0.0)};
}

void Linear::apply(std::span<const double> in, std::span<double> out) const {
  const auto& k = simd::kernels();
  for (std::size_t o = 0; o < weight.rows(); ++o) {
    out[o] = k.dot(weight.row(o).data(), in.data(), in.size()) + bias[o];
  }
}

Matrix Linear::apply_rows(const Matrix& x) const {
  Matrix y(x.rows(), out_dim());
  for (std::size_t t = 0; t < x.rows(); ++t) apply(x.row(t), y.row(t));
  return y;
}

Matrix feed_forward(const Matrix& x, const FeedForward& ffn) {
  Matrix h = ffn.up.apply_rows(x);
  for (double& v : h.values()) v = std::max(0.0, v);
  return ffn.down.apply_rows(h);
}

Matrix self_attention(const Matrix& x, const SelfAttention& attn) {
  const std::size_t frames = x.rows();
  const std::size_t d = x.cols();
  const auto heads = static_cast<std::size_t>(attn.num_heads);
  const std::size_t dh = d / heads;
  const Matrix q = attn.query.apply_rows(x);
  const Matrix kmat = attn.key.apply_rows(x);
  const Matrix v = attn.value.apply_rows(x);
  const auto& k = simd::kernels();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Matrix context(frames, d);
  std::vector<double> scores(frames);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t off = h * dh;
    for (std::size_t i = 0; i < frames; ++i) {
      double mx = -INFINITY;
      for (std::size_t j = 0; j < frames; ++j) {
        scores[j] = k.dot(q.row(i).data() + off, kmat.row(j).data() + off, dh) * scale;
        mx = std::max(mx, scores[j]);
      }
      double z = 0.0;
      for (double& s : scores) {
        s = std::exp(s - mx);
        z += s;
      }
      double* out = context.row(i).data() + off;
      for (std::size_t j = 0; j < frames; ++j) {
        k.axpy(scores[j] / z, v.row(j).data() + off, out, dh);
      }
    }
  }
  return attn.output.apply_rows(context);
}

Matrix conv_module(const Matrix& x, const ConvModule& conv) {
  const std::size_t frames = x.rows();
  const std::size_t d = x.cols();
  const Matrix expanded = conv.pointwise_in.apply_rows(x);
  Matrix gated(frames, d);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      const double gate = expanded(t, d + c);
      gated(t, c) = expanded(t, c) / (1.0 + std::exp(-gate));
    }
  }
  const auto width = static_cast<long long>(conv.depthwise.cols());
  const long long half = width / 2;
  Matrix depth(frames, d);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t c = 0; c < d; ++c) {
      double acc = conv.depthwise_bias[c];
      for (long long j = 0; j < width; ++j) {
        const long long src = static_cast<long long>(t) + j - half;
        if (src < 0 || src >= static_cast<long long>(frames)) continue;
        acc += conv.depthwise(c, static_cast<std::size_t>(j)) *
               gated(static_cast<std::size_t>(src), c);
      }
      depth(t, c) = std::max(0.0, acc);
    }
  }
  return conv.pointwise_out.apply_rows(depth);
}

Matrix conformer_block(const Matrix& x, const KernelParams& params) {
  params.validate();
  require(x.rows() >= 1, "need at least one frame");
  require(x.cols() == static_cast<std::size_t>(params.d_model),
          "input has " + std::to_string(x.cols()) + " dims, d_model is " +
              std::to_string(params.d_model));
  const auto& k = simd::kernels();
  const std::size_t n = x.rows() * x.cols();

  Matrix x1 = x;
  const Matrix f1 = feed_forward(x, params.ffn1);
  k.axpy(0.5, f1.values().data(), x1.values().data(), n);

  Matrix x2 = x1;
  const Matrix att = self_attention(x1, params.mhsa);
  k.accumulate(att.values().data(), x2.values().data(), n);

  Matrix x3 = x2;
  const Matrix cv = conv_module(x2, params.conv);
  k.accumulate(cv.values().data(), x3.values().data(), n);

  Matrix pre = x3;
  const Matrix f2 = feed_forward(x3, params.ffn2);
  k.axpy(0.5, f2.values().data(), pre.values().data(), n);

  Matrix y(x.rows(), x.cols());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    const auto row = layer_norm(pre.row(t), params.norm_gamma, params.norm_beta);
    std::copy(row.begin(), row.end(), y.row(t).begin());
  }
  return y;
}

KernelParams KernelParams::zeros(int d_model, int num_heads, int ffn_hidden,
                                 int conv_kernel) {
  const auto d = static_cast<std::size_t>(d_model);
  const auto h = static_cast<std::size_t>(ffn_hidden);
  KernelParams p;
  p.d_model = d_model;
  p.num_heads = num_heads;
  p.ffn_hidden = ffn_hidden;
  p.conv_kernel = conv_kernel;
  p.ffn1 = {Linear::zeros(d, h), Linear::zeros(h, d)};
  p.ffn2 = {Linear::zeros(d, h), Linear::zeros(h, d)};
  p.mhsa = {num_heads, Linear::zeros(d, d), Linear::zeros(d, d),
            Linear::zeros(d, d), Linear::zeros(d, d)};
  p.conv = {Linear::zeros(d, 2 * d), Matrix(d, static_cast<std::size_t>(conv_kernel)),
            std::vector<double>(d, 0.0), Linear::zeros(d, d)};
  p.norm_gamma.assign(d, 1.0);
  p.norm_beta.assign(d, 0.0);
  return p;
}

KernelParams KernelParams::random(int d_model, int num_heads, int ffn_hidden,
                                  int conv_kernel, std::uint64_t seed,
                                  double scale) {
  std::mt19937_64 rng(seed);
  const auto d = static_cast<std::size_t>(d_model);
  const auto h = static_cast<std::size_t>(ffn_hidden);
  KernelParams p = zeros(d_model, num_heads, ffn_hidden, conv_kernel);
  p.ffn1 = {random_linear(d, h, rng, scale), random_linear(h, d, rng, scale)};
  p.ffn2 = {random_linear(d, h, rng, scale), random_linear(h, d, rng, scale)};
  p.mhsa = {num_heads, random_linear(d, d, rng, scale), random_linear(d, d, rng, scale),
            random_linear(d, d, rng, scale), random_linear(d, d, rng, scale)};
  std::normal_distribution<double> n(0.0, scale);
  p.conv.pointwise_in = random_linear(d, 2 * d, rng, scale);
  for (double& w : p.conv.depthwise.values()) w = n(rng);
  for (double& b : p.conv.depthwise_bias) b = n(rng);
  p.conv.pointwise_out = random_linear(d, d, rng, scale);
  for (double& g : p.norm_gamma) g = 1.0 + n(rng);
  for (double& b : p.norm_beta) b = n(rng);
  return p;
}

void KernelParams::validate() const {
  require(d_model >= 1 && num_heads >= 1 && d_model % num_heads == 0,
          "d_model must be a positive multiple of num_heads");
  require(ffn_hidden >= 1, "ffn_hidden must be >= 1");
  require(conv_kernel >= 1 && conv_kernel % 2 == 1, "conv_kernel must be odd");
  require(alpha >= 0 && alpha <= 1 && lambda >= 0 && lambda <= 1,
          "alpha and lambda must lie in [0, 1]");
  require(mhsa.num_heads == num_heads, "attention head count mismatch");
  const auto d = static_cast<std::size_t>(d_model);
  const auto h = static_cast<std::size_t>(ffn_hidden);
  check_linear(ffn1.up, d, h, "ffn1.up");
  check_linear(ffn1.down, h, d, "ffn1.down");
  check_linear(ffn2.up, d, h, "ffn2.up");
  check_linear(ffn2.down, h, d, "ffn2.down");
  check_linear(mhsa.query, d, d, "mhsa.query");
  check_linear(mhsa.key, d, d, "mhsa.key");
  check_linear(mhsa.value, d, d, "mhsa.value");
  check_linear(mhsa.output, d, d, "mhsa.output");
  check_linear(conv.pointwise_in, d, 2 * d, "conv.pointwise_in");
  check_linear(conv.pointwise_out, d, d, "conv.pointwise_out");
  require(conv.depthwise.rows() == d &&
              conv.depthwise.cols() == static_cast<std::size_t>(conv_kernel) &&
              conv.depthwise_bias.size() == d,
          "depthwise kernel shape");
  require(norm_gamma.size() == d && norm_beta.size() == d, "layernorm shape");
}

}  // namespace redmask::kernel
