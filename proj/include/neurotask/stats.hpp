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

// One-way ANOVA over subject-level metric values, post-hoc pairwise
// comparisons and Bonferroni correction. F-distribution tails come from the
// regularised incomplete beta function evaluated by continued fraction.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neurotask/data_model.hpp"

namespace neurotask::stats {

/// I_x(a, b) for a, b > 0 and x in [0, 1]. Throws InvalidArgument otherwise.
double regularized_incomplete_beta(double a, double b, double x);

/// P(F > f) for F ~ F(d1, d2).
double f_survival(double f, double d1, double d2);

struct AnovaResult {
  double f_stat = 0.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;
  double p_value = 1.0;
};

/// F = (SSB / (g - 1)) / (SSW / (N - g)). Throws DegenerateGroups when there
/// are fewer than two groups or a group has fewer than two observations, and
/// ZeroWithinVariance when every group is constant.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

/// min(1, m * p). Throws OutOfRangeP for p outside [0, 1], InvalidArgument
/// for m = 0.
double bonferroni(double p_raw, std::size_t m);

struct PairwiseRow {
  TaskId task_a;
  TaskId task_b;
  double f_stat = 0.0;
  double p_raw = 1.0;
  double p_corrected = 1.0;
};

struct PairwiseTable {
  std::size_t family_m = 0;
  std::vector<PairwiseRow> rows;

  /// Looks a pair up in either order.
  const PairwiseRow* find(TaskCode a, TaskCode b) const;
};

using TaskValues = std::vector<std::pair<TaskId, std::vector<double>>>;

/// Two-group ANOVA for every unordered task pair (in input order), corrected
/// with family size `family_m` (default: the number of pairs). All value
/// vectors must have the same length (one value per subject).
PairwiseTable pairwise_posthoc(const TaskValues& task_values,
                               std::optional<std::size_t> family_m = std::nullopt);

/// "T1,T2,F,p_raw,p-value" with the corrected value last.
std::string pairwise_csv(const PairwiseTable& table);

}  // namespace neurotask::stats
