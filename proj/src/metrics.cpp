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

#include "neurotask/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "neurotask/encoder.hpp"
#include "neurotask/error.hpp"
#include "neurotask/format.hpp"
#include "neurotask/simd/kernels.hpp"

namespace neurotask::metrics {

namespace {

std::span<const double> row_span(const Matrix& m, Eigen::Index r) {
  return {m.data() + r * m.cols(), static_cast<std::size_t>(m.cols())};
}

void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::kShapeMismatch, "actual is " + std::to_string(a.rows()) + "x" +
                                        std::to_string(a.cols()) + ", predicted is " +
                                        std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

// Mean of per-row correlations; rows with zero variance are skipped.
PearsonResult rowwise_pearson(const Matrix& a, const Matrix& b, Vector* scores) {
  PearsonResult result;
  double total = 0.0;
  if (scores) *scores = Vector::Zero(a.rows());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    auto c = pearson(row_span(a, r), row_span(b, r));
    if (!c) {
      ++result.excluded;
      continue;
    }
    if (scores) (*scores)(r) = *c;
    total += *c;
    ++result.used;
  }
  if (result.used == 0) fail(ErrorKind::kZeroVariance, "every row/column has zero variance");
  result.value = total / static_cast<double>(result.used);
  return result;
}

}  // namespace

double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kLengthMismatch, "cosine distance of unequal lengths");
  const double na = std::sqrt(simd::dot(a, a));
  const double nb = std::sqrt(simd::dot(b, b));
  if (na == 0.0 || nb == 0.0) fail(ErrorKind::kZeroVector, "cosine distance of a zero vector");
  const double cosine = std::clamp(simd::dot(a, b) / (na * nb), -1.0, 1.0);
  return 1.0 - cosine;
}

double two_v_two(const Matrix& actual, const Matrix& predicted) {
  require_same_shape(actual, predicted);
  const Eigen::Index n = actual.rows();
  if (n < 2) fail(ErrorKind::kTooFewSamples, "2V2 needs at least two samples");

  std::vector<double> norm_a(n);
  std::vector<double> norm_p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    norm_a[i] = std::sqrt(simd::dot(row_span(actual, i), row_span(actual, i)));
    norm_p[i] = std::sqrt(simd::dot(row_span(predicted, i), row_span(predicted, i)));
    if (norm_a[i] == 0.0 || norm_p[i] == 0.0) {
      fail(ErrorKind::kZeroVector, "sample " + std::to_string(i) + " is a zero vector");
    }
  }
  // cross(i, j) = cos(actual_i, predicted_j), one GEMM over unit rows.
  Matrix unit_a = actual;
  Matrix unit_p = predicted;
  for (Eigen::Index i = 0; i < n; ++i) {
    unit_a.row(i) /= norm_a[i];
    unit_p.row(i) /= norm_p[i];
  }
  const Matrix cross = unit_a * unit_p.transpose();
  auto dist = [&](Eigen::Index i, Eigen::Index j) {
    return 1.0 - std::clamp(cross(i, j), -1.0, 1.0);
  };
  std::size_t wins = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double matched = dist(i, i) + dist(j, j);
      const double mismatched = dist(i, j) + dist(j, i);
      if (matched < mismatched) ++wins;
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(wins) / pairs;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kLengthMismatch, "correlation of unequal lengths");
  if (a.empty()) return std::nullopt;
  auto constant = [](std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
  };
  if (constant(a) || constant(b)) return std::nullopt;
  const double ma = simd::mean(a);
  const double mb = simd::mean(b);
  const double saa = simd::centered_dot(a, ma, a, ma);
  const double sbb = simd::centered_dot(b, mb, b, mb);
  if (!(saa > 0.0) || !(sbb > 0.0)) return std::nullopt;
  const double sab = simd::centered_dot(a, ma, b, mb);
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

PearsonResult pearson_metric(const Matrix& actual, const Matrix& predicted, PcMode mode) {
  require_same_shape(actual, predicted);
  if (mode == PcMode::kPerSample) return rowwise_pearson(actual, predicted, nullptr);
  const Matrix at = actual.transpose();
  const Matrix pt = predicted.transpose();
  return rowwise_pearson(at, pt, nullptr);
}

VoxelPearson per_voxel_pearson(const Matrix& actual, const Matrix& predicted) {
  require_same_shape(actual, predicted);
  const Matrix at = actual.transpose();
  const Matrix pt = predicted.transpose();
  VoxelPearson out;
  out.scores = Vector::Zero(at.rows());
  for (Eigen::Index v = 0; v < at.rows(); ++v) {
    auto c = pearson(row_span(at, v), row_span(pt, v));
    if (c) {
      out.scores(v) = *c;
    } else {
      ++out.excluded;
    }
  }
  return out;
}

double mae(const Matrix& actual, const Matrix& predicted) {
  require_same_shape(actual, predicted);
  if (actual.size() == 0) fail(ErrorKind::kEmptyMatrix, "MAE of an empty matrix");
  const double total = simd::sum_abs_diff({actual.data(), static_cast<std::size_t>(actual.size())},
                                          {predicted.data(), static_cast<std::size_t>(predicted.size())});
  return total / static_cast<double>(actual.size());
}

Vector per_voxel_mae(const Matrix& actual, const Matrix& predicted) {
  require_same_shape(actual, predicted);
  if (actual.size() == 0) fail(ErrorKind::kEmptyMatrix, "MAE of an empty matrix");
  Vector acc = Vector::Zero(actual.cols());
  const auto& k = simd::kernels();
  for (Eigen::Index r = 0; r < actual.rows(); ++r) {
    k.accumulate_abs_diff(acc.data(), actual.data() + r * actual.cols(),
                          predicted.data() + r * predicted.cols(),
                          static_cast<std::size_t>(actual.cols()));
  }
  return acc / static_cast<double>(actual.rows());
}

MetricReport evaluate(const TaskId& task, const std::string& subject_id, const RoiSpec& roi,
                      const Matrix& actual, const Matrix& predicted, PcMode mode) {
  MetricReport r;
  r.task = task;
  r.subject_id = subject_id;
  r.roi = roi;
  r.twov2 = two_v_two(actual, predicted);
  const auto pc = pearson_metric(actual, predicted, mode);
  r.pearson = pc.value;
  r.pearson_mode = mode;
  r.pearson_excluded = pc.excluded;
  r.mae = mae(actual, predicted);
  r.per_voxel_pearson = per_voxel_pearson(actual, predicted).scores;
  r.per_voxel_mae = per_voxel_mae(actual, predicted);
  return r;
}

MetricReport evaluate(const encoder::EncodingRun& run, const Matrix& actual, PcMode mode) {
  return evaluate(run.task, run.subject_id, run.roi, actual, run.predictions, mode);
}

std::string csv_header() { return "dataset,task,subject,roi,metric,value\n"; }

std::string to_csv_rows(const MetricReport& report, const std::string& dataset_id) {
  const std::string prefix = csv_escape(dataset_id) + "," + std::string(report.task.code_string()) +
                             "," + csv_escape(report.subject_id) + "," + csv_escape(report.roi.name) +
                             ",";
  return prefix + "2v2," + format_double(report.twov2) + "\n" + prefix + "pearson," +
         format_double(report.pearson) + "\n" + prefix + "mae," + format_double(report.mae) + "\n";
}

nlohmann::ordered_json to_json(const MetricReport& report, const std::string& dataset_id) {
  nlohmann::ordered_json j;
  j["dataset"] = dataset_id;
  j["task"] = report.task.code_string();
  j["subject"] = report.subject_id;
  j["roi"] = report.roi.name;
  j["voxels"] = report.roi.voxel_count;
  j["2v2"] = report.twov2;
  j["pearson"] = report.pearson;
  j["pearson_mode"] = to_string(report.pearson_mode);
  j["pearson_excluded"] = report.pearson_excluded;
  j["mae"] = report.mae;
  return j;
}

}  // namespace neurotask::metrics
