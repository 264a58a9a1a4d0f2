// Copyright 2026 The neurotask Authors.
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

// Reduction kernels shared by the metric, correlation and similarity code.
// Each kernel has a portable scalar reference and, on x86-64, an AVX2+FMA
// variant. The variant is chosen once per process from CPUID, and can be
// pinned with NEUROTASK_SIMD=scalar|avx2.
//
// Variants agree to rounding only: the AVX2 reductions sum in a different
// order, so results may differ from the scalar ones in the last few ulps.
// Within a process the same table is used everywhere, which keeps pipeline
// outputs independent of the worker count.

#include <cstddef>
#include <span>
#include <string_view>

namespace neurotask::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i a[i]
  double (*sum)(const double* a, std::size_t n);
  // sum_i (a[i] - mean_a) * (b[i] - mean_b)
  double (*centered_dot)(const double* a, double mean_a, const double* b, double mean_b,
                         std::size_t n);
  // sum_i |a[i] - b[i]|
  double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);
  // acc[i] += |a[i] - b[i]|
  void (*accumulate_abs_diff)(double* acc, const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels() noexcept;

bool cpu_supports_avx2() noexcept;

/// The table selected for this process.
const KernelTable& kernels() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) { return kernels().sum(a.data(), a.size()); }
inline double mean(std::span<const double> a) {
  return a.empty() ? 0.0 : sum(a) / static_cast<double>(a.size());
}
inline double centered_dot(std::span<const double> a, double mean_a, std::span<const double> b,
                           double mean_b) {
  return kernels().centered_dot(a.data(), mean_a, b.data(), mean_b, a.size());
}
inline double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
  return kernels().sum_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace neurotask::simd
