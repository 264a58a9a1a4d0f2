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

#include "neurotask/simd/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define NEUROTASK_HAVE_AVX2 1
#include <immintrin.h>
#endif

namespace neurotask::simd {

#ifdef NEUROTASK_HAVE_AVX2
namespace {

#define NT_AVX2 __attribute__((target("avx2,fma")))

NT_AVX2 inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

NT_AVX2 inline __m256d vabs(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

NT_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  if (i + 4 <= n) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

NT_AVX2 double sum_avx2(const double* a, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_add_pd(_mm256_loadu_pd(a + i), s0);
    s1 = _mm256_add_pd(_mm256_loadu_pd(a + i + 4), s1);
  }
  if (i + 4 <= n) {
    s0 = _mm256_add_pd(_mm256_loadu_pd(a + i), s0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i];
  return s;
}

NT_AVX2 double centered_dot_avx2(const double* a, double mean_a, const double* b, double mean_b,
                                 std::size_t n) {
  const __m256d ma = _mm256_set1_pd(mean_a);
  const __m256d mb = _mm256_set1_pd(mean_b);
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d da0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), ma);
    __m256d db0 = _mm256_sub_pd(_mm256_loadu_pd(b + i), mb);
    __m256d da1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), ma);
    __m256d db1 = _mm256_sub_pd(_mm256_loadu_pd(b + i + 4), mb);
    s0 = _mm256_fmadd_pd(da0, db0, s0);
    s1 = _mm256_fmadd_pd(da1, db1, s1);
  }
  if (i + 4 <= n) {
    __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), ma);
    __m256d db = _mm256_sub_pd(_mm256_loadu_pd(b + i), mb);
    s0 = _mm256_fmadd_pd(da, db, s0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += (a[i] - mean_a) * (b[i] - mean_b);
  return s;
}

NT_AVX2 double sum_abs_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_add_pd(vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))), s0);
    s1 = _mm256_add_pd(
        vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4))), s1);
  }
  if (i + 4 <= n) {
    s0 = _mm256_add_pd(vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))), s0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d < 0 ? -d : d;
  }
  return s;
}

// Elementwise, so bit-identical to the scalar version.
NT_AVX2 void accumulate_abs_diff_avx2(double* acc, const double* a, const double* b,
                                      std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), d));
  }
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    acc[i] += d < 0 ? -d : d;
  }
}

#undef NT_AVX2

}  // namespace

bool cpu_supports_avx2() noexcept {
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported;
}

const KernelTable* avx2_kernels() noexcept {
  static const KernelTable table{Isa::kAvx2,       dot_avx2,          sum_avx2,
                                 centered_dot_avx2, sum_abs_diff_avx2, accumulate_abs_diff_avx2};
  return cpu_supports_avx2() ? &table : nullptr;
}

#else

bool cpu_supports_avx2() noexcept { return false; }
const KernelTable* avx2_kernels() noexcept { return nullptr; }

#endif

}  // namespace neurotask::simd
