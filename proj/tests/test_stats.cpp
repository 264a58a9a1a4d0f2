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

#include "neurotask/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace neurotask;
using namespace neurotask::stats;
using testing::error_kind;

namespace {

std::vector<std::vector<double>> random_groups(testing::Rng& rng, std::size_t k, std::size_t n) {
  std::vector<std::vector<double>> g(k, std::vector<double>(n));
  for (std::size_t i = 0; i < k; ++i) {
    const double shift = rng.uniform(-1.0, 1.0);
    for (auto& v : g[i]) v = shift + rng.normal();
  }
  return g;
}

}  // namespace

TEST_CASE("two-group ANOVA by hand") {
  const auto r = one_way_anova({{1, 2, 3}, {4, 5, 6}});
  CHECK(r.f_stat == 13.5);
  CHECK(r.df_between == 1);
  CHECK(r.df_within == 4);
  CHECK(std::abs(r.p_value - oracle::f_survival(13.5, 1, 4)) < 1e-4);
  CHECK(r.p_value == doctest::Approx(0.02132).epsilon(1e-3));
}

TEST_CASE("identical groups give F = 0 and p = 1") {
  const auto r = one_way_anova({{1, 2, 3}, {1, 2, 3}});
  CHECK(r.f_stat == 0.0);
  CHECK(r.p_value == 1.0);
}

TEST_CASE("ten groups of five") {
  testing::Rng rng(1);
  const auto r = one_way_anova(random_groups(rng, 10, 5));
  CHECK(r.df_between == 9);
  CHECK(r.df_within == 40);
  const auto big = one_way_anova(random_groups(rng, 10, 82));
  CHECK(big.df_within == 810);
}

TEST_CASE("ANOVA rejections") {
  CHECK(error_kind([] { one_way_anova({{1, 2, 3}}); }) == ErrorKind::kDegenerateGroups);
  CHECK(error_kind([] { one_way_anova({{1, 2, 3}, {4}}); }) == ErrorKind::kDegenerateGroups);
  CHECK(error_kind([] { one_way_anova({{1, 1}, {2, 2}}); }) == ErrorKind::kZeroWithinVariance);
  CHECK(error_kind([] { one_way_anova({{1, NAN}, {2, 3}}); }) == ErrorKind::kNonFiniteValues);
}

TEST_CASE("F survival matches an independent distribution library") {
  testing::Rng rng(2);
  for (int trial = 0; trial < 400; ++trial) {
    const double d1 = static_cast<double>(rng.index(1, 30));
    const double d2 = static_cast<double>(rng.index(1, 900));
    const double f = std::exp(rng.uniform(-6.0, 4.0));
    CAPTURE(d1);
    CAPTURE(d2);
    CAPTURE(f);
    CHECK(std::abs(f_survival(f, d1, d2) - oracle::f_survival(f, d1, d2)) < 1e-10);
  }
  CHECK(f_survival(0.0, 3, 7) == 1.0);
  CHECK(f_survival(25.0, 1, 8) == doctest::Approx(0.00105283).epsilon(1e-5));
}

TEST_CASE("incomplete beta edge values") {
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  // I_x(a, 1) = x^a
  CHECK(regularized_incomplete_beta(2.5, 1.0, 0.4) == doctest::Approx(std::pow(0.4, 2.5)).epsilon(1e-13));
}

TEST_CASE("property: two-group F equals the squared pooled t statistic") {
  testing::Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_groups(rng, 2, rng.index(2, 40));
    std::vector<double> b(rng.index(2, 40));
    for (auto& v : b) v = rng.normal();
    const double t = oracle::pooled_t(g[0], b);
    const double f = one_way_anova({g[0], b}).f_stat;
    CHECK(std::abs(f - t * t) <= 1e-10 * std::max(1.0, t * t));
  }
}

TEST_CASE("property: location, scale and relabeling invariance") {
  testing::Rng rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = random_groups(rng, rng.index(2, 8), rng.index(2, 12));
    const auto base = one_way_anova(g);
    CHECK(base.p_value >= 0.0);
    CHECK(base.p_value <= 1.0);
    const double shift = rng.uniform(-100.0, 100.0);
    const double scale = rng.uniform(0.1, 10.0) * (rng.index(0, 1) ? 1.0 : -1.0);
    auto moved = g;
    for (auto& group : moved) {
      for (auto& v : group) v = scale * (v + shift);
    }
    CHECK(one_way_anova(moved).f_stat == doctest::Approx(base.f_stat).epsilon(1e-10));
    auto relabeled = g;
    const auto perm = rng.permutation(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) relabeled[i] = g[perm[i]];
    const auto r = one_way_anova(relabeled);
    CHECK(r.f_stat == doctest::Approx(base.f_stat).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(base.p_value).epsilon(1e-10));
  }
}

TEST_CASE("property: p decreases as F grows at fixed df") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double d1 = static_cast<double>(rng.index(1, 20));
    const double d2 = static_cast<double>(rng.index(1, 200));
    double previous = 1.0;
    for (double f = 0.0; f < 50.0; f += 0.37) {
      const double p = f_survival(f, d1, d2);
      CHECK(p <= previous);
      CHECK(p >= 0.0);
      previous = p;
    }
  }
}

TEST_CASE("Bonferroni") {
  CHECK(bonferroni(0.01, 10) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(bonferroni(0.2, 10) == 1.0);
  CHECK(bonferroni(0.0, 45) == 0.0);
  CHECK(bonferroni(0.5, 1) == 0.5);
  CHECK(error_kind([] { bonferroni(-0.1, 3); }) == ErrorKind::kOutOfRangeP);
  CHECK(error_kind([] { bonferroni(1.1, 3); }) == ErrorKind::kOutOfRangeP);
  CHECK(error_kind([] { bonferroni(0.5, 0); }) == ErrorKind::kInvalidArgument);
  testing::Rng rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = rng.uniform(0.0, 1.0);
    const double q = rng.uniform(0.0, 1.0);
    const std::size_t m = rng.index(1, 100);
    const std::size_t m2 = rng.index(1, 100);
    CHECK(bonferroni(p, m) == std::min(1.0, static_cast<double>(m) * p));
    CHECK(bonferroni(p, m) >= p);
    if (p <= q) CHECK(bonferroni(p, m) <= bonferroni(q, m));
    if (m <= m2) CHECK(bonferroni(p, m) <= bonferroni(p, m2));
  }
}

TEST_CASE("pairwise post-hoc table") {
  const TaskId a = TaskId::from_code(TaskCode::kCR);
  const TaskId b = TaskId::from_code(TaskCode::kNER);
  SUBCASE("hand pair") {
    const auto t = pairwise_posthoc({{a, {1, 2, 3, 4, 5}}, {b, {6, 7, 8, 9, 10}}});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.family_m == 1);
    CHECK(t.rows[0].f_stat == 25.0);
    CHECK(std::abs(t.rows[0].p_raw - oracle::f_survival(25.0, 1, 8)) < 1e-4);
    CHECK(t.rows[0].p_raw == doctest::Approx(0.00105).epsilon(1e-2));
  }
  SUBCASE("identical subject vectors") {
    const auto t = pairwise_posthoc({{a, {0.7, 0.8, 0.75}}, {b, {0.7, 0.8, 0.75}}});
    CHECK(t.rows[0].p_raw == 1.0);
  }
  SUBCASE("ten tasks give 45 rows") {
    testing::Rng rng(7);
    TaskValues values;
    for (std::size_t i = 0; i < 10; ++i) {
      std::vector<double> v(5);
      for (auto& x : v) x = rng.normal();
      values.emplace_back(TaskId::from_code(kAllTaskCodes[i]), v);
    }
    const auto t = pairwise_posthoc(values);
    CHECK(t.rows.size() == 45);
    CHECK(t.family_m == 45);
    for (const auto& row : t.rows) CHECK(row.p_corrected == bonferroni(row.p_raw, 45));
    CHECK(t.find(TaskCode::kNER, TaskCode::kCR) == &t.rows[0]);
    CHECK(t.find(TaskCode::kCR, TaskCode::kBASE) == nullptr);
    const auto custom = pairwise_posthoc(values, 450);
    CHECK(custom.family_m == 450);
    const std::string csv = pairwise_csv(t);
    CHECK(csv.rfind("T1,T2,F,p_raw,p-value\nCR,NER,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 46);
  }
  SUBCASE("unequal subject counts") {
    CHECK(error_kind([&] { pairwise_posthoc({{a, {1, 2, 3}}, {b, {1, 2}}}); }) == ErrorKind::kLengthMismatch);
  }
}
