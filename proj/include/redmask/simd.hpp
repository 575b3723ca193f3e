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
#include <string_view>

namespace redmask::simd {

// Inner-loop kernels shared by the frontend, the mask applier and the
// numeric kernel. Every implementation in a table must agree with the
// scalar reference: elementwise kernels bit-for-bit, reductions up to
// summation order.
struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // acc[i] += x[i]
  void (*accumulate)(const double* x, double* acc, std::size_t n);
  // acc[i] += (x[i] - mean[i])^2
  void (*accumulate_sq_diff)(const double* x, const double* mean, double* acc,
                             std::size_t n);
  // y[i] = (x[i] - shift[i]) * scale[i]
  void (*shift_scale)(const double* x, const double* shift, const double* scale,
                      double* y, std::size_t n);
  // y[i] = a[i] * b[i]
  void (*multiply)(const double* a, const double* b, double* y, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks
// AVX2+FMA.
const KernelTable* avx2_kernels();

// Best table for this CPU, chosen once. Setting REDMASK_SIMD=scalar in the
// environment forces the scalar reference.
const KernelTable& kernels();

}  // namespace redmask::simd
