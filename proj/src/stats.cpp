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

#include "neurotask/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "neurotask/error.hpp"
#include "neurotask/format.hpp"

namespace neurotask::stats {

namespace {

// Continued fraction for I_x(a, b), modified Lentz evaluation.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  fail(ErrorKind::kInvalidArgument, "incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "incomplete beta needs a, b > 0 and x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_survival(double f, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) fail(ErrorKind::kInvalidArgument, "F degrees of freedom must be > 0");
  if (std::isnan(f)) fail(ErrorKind::kInvalidArgument, "F statistic is NaN");
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = d2 / (d2 + d1 * f);
  return std::clamp(regularized_incomplete_beta(d2 / 2.0, d1 / 2.0, x), 0.0, 1.0);
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) fail(ErrorKind::kDegenerateGroups, "ANOVA needs at least two groups");
  std::size_t total = 0;
  double grand_sum = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].size() < 2) {
      fail(ErrorKind::kDegenerateGroups, "group " + std::to_string(g) + " has fewer than two observations");
    }
    for (double v : groups[g]) {
      if (!std::isfinite(v)) fail(ErrorKind::kNonFiniteValues, "ANOVA input is not finite");
      grand_sum += v;
    }
    total += groups[g].size();
  }
  const double grand_mean = grand_sum / static_cast<double>(total);
  double ssb = 0.0;
  double ssw = 0.0;
  for (const auto& group : groups) {
    double s = 0.0;
    for (double v : group) s += v;
    const double mean = s / static_cast<double>(group.size());
    ssb += static_cast<double>(group.size()) * (mean - grand_mean) * (mean - grand_mean);
    for (double v : group) ssw += (v - mean) * (v - mean);
  }
  AnovaResult r;
  r.df_between = groups.size() - 1;
  r.df_within = total - groups.size();
  if (!(ssw > 0.0)) fail(ErrorKind::kZeroWithinVariance, "every group is constant");
  r.f_stat = (ssb / static_cast<double>(r.df_between)) / (ssw / static_cast<double>(r.df_within));
  r.p_value = f_survival(r.f_stat, static_cast<double>(r.df_between),
                         static_cast<double>(r.df_within));
  return r;
}

double bonferroni(double p_raw, std::size_t m) {
  if (!(p_raw >= 0.0 && p_raw <= 1.0)) {
    fail(ErrorKind::kOutOfRangeP, "p-value " + format_double(p_raw) + " outside [0, 1]");
  }
  if (m == 0) fail(ErrorKind::kInvalidArgument, "Bonferroni family size must be >= 1");
  return std::min(1.0, static_cast<double>(m) * p_raw);
}

const PairwiseRow* PairwiseTable::find(TaskCode a, TaskCode b) const {
  for (const auto& row : rows) {
    if ((row.task_a.code == a && row.task_b.code == b) ||
        (row.task_a.code == b && row.task_b.code == a)) {
      return &row;
    }
  }
  return nullptr;
}

PairwiseTable pairwise_posthoc(const TaskValues& task_values, std::optional<std::size_t> family_m) {
  if (task_values.size() < 2) fail(ErrorKind::kDegenerateGroups, "pairwise comparisons need two tasks");
  const std::size_t len = task_values.front().second.size();
  for (const auto& [task, values] : task_values) {
    if (values.size() != len) {
      fail(ErrorKind::kLengthMismatch, "task " + std::string(task.code_string()) + " has " +
                                           std::to_string(values.size()) + " values, expected " +
                                           std::to_string(len));
    }
  }
  const std::size_t pairs = task_values.size() * (task_values.size() - 1) / 2;
  PairwiseTable table;
  table.family_m = family_m.value_or(pairs);
  table.rows.reserve(pairs);
  for (std::size_t i = 0; i < task_values.size(); ++i) {
    for (std::size_t j = i + 1; j < task_values.size(); ++j) {
      const auto r = one_way_anova({task_values[i].second, task_values[j].second});
      PairwiseRow row{task_values[i].first, task_values[j].first, r.f_stat, r.p_value,
                      bonferroni(r.p_value, table.family_m)};
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

std::string pairwise_csv(const PairwiseTable& table) {
  std::string out = "T1,T2,F,p_raw,p-value\n";
  for (const auto& row : table.rows) {
    out += std::string(row.task_a.code_string()) + "," + std::string(row.task_b.code_string()) + "," +
           format_double(row.f_stat) + "," + format_double(row.p_raw) + "," +
           format_double(row.p_corrected) + "\n";
  }
  return out;
}

}  // namespace neurotask::stats
