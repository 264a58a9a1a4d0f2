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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "neurotask/simd/kernels.hpp"
#include "support.hpp"

using namespace neurotask;

namespace {

std::vector<double> random_values(testing::Rng& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

// Reduction order differs between variants, so agreement is bounded by the
// magnitude of the summed terms.
double reduction_tolerance(std::size_t n, double term_sum) {
  return 8.0 * static_cast<double>(n + 1) * 2.2e-16 * term_sum + 1e-300;
}

}  // namespace

TEST_CASE("kernel table is selected once and reports its variant") {
  const auto& k = simd::kernels();
  CHECK(&k == &simd::kernels());
  if (simd::cpu_supports_avx2()) {
    CHECK(simd::avx2_kernels() != nullptr);
  } else {
    CHECK(simd::avx2_kernels() == nullptr);
  }
  CHECK(simd::to_string(simd::Isa::kScalar) == "scalar");
  CHECK(simd::to_string(simd::Isa::kAvx2) == "avx2");
}

TEST_CASE("scalar kernels on hand values") {
  const auto& s = simd::scalar_kernels();
  const double a[] = {1, 2, 3, 4, 5};
  const double b[] = {5, 4, 3, 2, 1};
  CHECK(s.dot(a, b, 5) == 35.0);
  CHECK(s.sum(a, 5) == 15.0);
  CHECK(s.centered_dot(a, 3.0, b, 3.0, 5) == -10.0);
  CHECK(s.sum_abs_diff(a, b, 5) == 12.0);
  double acc[5] = {1, 1, 1, 1, 1};
  s.accumulate_abs_diff(acc, a, b, 5);
  CHECK(acc[0] == 5.0);
  CHECK(acc[2] == 1.0);
  CHECK(acc[4] == 5.0);
  CHECK(s.dot(a, b, 0) == 0.0);
  CHECK(s.sum(a, 0) == 0.0);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const simd::KernelTable* v = simd::avx2_kernels();
  if (v == nullptr) {
    MESSAGE("AVX2 not available on this CPU; equivalence not exercised");
    return;
  }
  const auto& s = simd::scalar_kernels();
  testing::Rng rng(17);
  for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 63u, 64u, 65u, 100u, 1023u, 4099u}) {
    for (std::size_t offset : {0u, 1u, 3u}) {
      for (double scale : {1e-3, 1.0, 1e6}) {
        auto a = random_values(rng, n + offset, scale);
        auto b = random_values(rng, n + offset, scale);
        const double* pa = a.data() + offset;
        const double* pb = b.data() + offset;
        double abs_prod = 0.0;
        double abs_a = 0.0;
        double abs_diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          abs_prod += std::abs(pa[i] * pb[i]);
          abs_a += std::abs(pa[i]);
          abs_diff += std::abs(pa[i] - pb[i]);
        }
        CAPTURE(n);
        CAPTURE(offset);
        CHECK(std::abs(v->dot(pa, pb, n) - s.dot(pa, pb, n)) <= reduction_tolerance(n, abs_prod));
        CHECK(std::abs(v->sum(pa, n) - s.sum(pa, n)) <= reduction_tolerance(n, abs_a));
        const double ma = n ? s.sum(pa, n) / static_cast<double>(n) : 0.0;
        const double mb = n ? s.sum(pb, n) / static_cast<double>(n) : 0.0;
        double abs_centered = 0.0;
        for (std::size_t i = 0; i < n; ++i) abs_centered += std::abs((pa[i] - ma) * (pb[i] - mb));
        CHECK(std::abs(v->centered_dot(pa, ma, pb, mb, n) - s.centered_dot(pa, ma, pb, mb, n)) <=
              reduction_tolerance(n, abs_centered));
        CHECK(std::abs(v->sum_abs_diff(pa, pb, n) - s.sum_abs_diff(pa, pb, n)) <=
              reduction_tolerance(n, abs_diff));

        std::vector<double> acc_s(n, 0.5);
        std::vector<double> acc_v(n, 0.5);
        s.accumulate_abs_diff(acc_s.data(), pa, pb, n);
        v->accumulate_abs_diff(acc_v.data(), pa, pb, n);
        CHECK(acc_s == acc_v);
      }
    }
  }
}

TEST_CASE("AVX2 kernels agree exactly on integer-valued data") {
  const simd::KernelTable* v = simd::avx2_kernels();
  if (v == nullptr) return;
  const auto& s = simd::scalar_kernels();
  testing::Rng rng(5);
  for (std::size_t n = 0; n < 70; ++n) {
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<double>(rng.index(0, 200)) - 100.0;
      b[i] = static_cast<double>(rng.index(0, 200)) - 100.0;
    }
    CHECK(v->dot(a.data(), b.data(), n) == s.dot(a.data(), b.data(), n));
    CHECK(v->sum(a.data(), n) == s.sum(a.data(), n));
    CHECK(v->sum_abs_diff(a.data(), b.data(), n) == s.sum_abs_diff(a.data(), b.data(), n));
    CHECK(v->centered_dot(a.data(), 2.0, b.data(), -3.0, n) == s.centered_dot(a.data(), 2.0, b.data(), -3.0, n));
  }
}

TEST_CASE("span helpers route through the selected table") {
  const std::vector<double> a = {1.0, 2.0, 3.0, 6.0};
  const std::vector<double> b = {2.0, 2.0, 2.0, 2.0};
  CHECK(simd::dot(a, b) == 24.0);
  CHECK(simd::sum(a) == 12.0);
  CHECK(simd::mean(a) == 3.0);
  CHECK(simd::mean(std::span<const double>{}) == 0.0);
  CHECK(simd::sum_abs_diff(a, b) == 6.0);
  CHECK(simd::centered_dot(a, 3.0, a, 3.0) == 14.0);
}
