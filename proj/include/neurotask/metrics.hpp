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

// Encoding evaluation metrics: pairwise 2V2 accuracy, Pearson correlation
// (per sample across voxels, or per voxel across samples) and mean absolute
// error, plus the per-voxel score vectors used for similarity analysis and
// brain-map export.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "neurotask/data_model.hpp"

namespace neurotask::encoder {
struct EncodingRun;
}

namespace neurotask::metrics {

/// 1 - a.b / (|a||b|), in [0, 2]. Throws ZeroVector or LengthMismatch.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// Fraction of unordered sample pairs (i, j) for which the matched cosine
/// distances beat the mismatched ones:
///   cosD(Y_i, P_i) + cosD(Y_j, P_j) < cosD(Y_i, P_j) + cosD(Y_j, P_i).
/// Ties count as failures. Throws TooFewSamples, ShapeMismatch, ZeroVector.
double two_v_two(const Matrix& actual, const Matrix& predicted);

/// Pearson correlation of two equal-length vectors. Returns nullopt when
/// either has zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

struct PearsonResult {
  double value = 0.0;
  std::size_t used = 0;      // rows (or columns) entering the mean
  std::size_t excluded = 0;  // zero-variance rows (or columns) skipped
};

/// Per-sample mode: mean over rows of corr(Y_i, P_i) across voxels.
/// Per-voxel mode: mean over columns of corr(Y[:, v], P[:, v]) across samples.
/// Zero-variance rows/columns are skipped and counted. Throws ShapeMismatch,
/// or ZeroVariance when nothing is left to average.
PearsonResult pearson_metric(const Matrix& actual, const Matrix& predicted, PcMode mode);

struct VoxelPearson {
  Vector scores;  // 0 for zero-variance voxels
  std::size_t excluded = 0;
};
VoxelPearson per_voxel_pearson(const Matrix& actual, const Matrix& predicted);

/// Mean of |Y - P| over all entries. Throws ShapeMismatch.
double mae(const Matrix& actual, const Matrix& predicted);
/// Column means of |Y - P|.
Vector per_voxel_mae(const Matrix& actual, const Matrix& predicted);

struct MetricReport {
  TaskId task;
  std::string subject_id;
  RoiSpec roi;
  double twov2 = 0.0;
  double pearson = 0.0;
  PcMode pearson_mode = PcMode::kPerSample;
  std::size_t pearson_excluded = 0;
  double mae = 0.0;
  Vector per_voxel_pearson;
  Vector per_voxel_mae;
};

/// Scores the pooled out-of-fold predictions of `run` against `actual`.
MetricReport evaluate(const encoder::EncodingRun& run, const Matrix& actual, PcMode mode);
MetricReport evaluate(const TaskId& task, const std::string& subject_id, const RoiSpec& roi,
                      const Matrix& actual, const Matrix& predicted, PcMode mode);

/// Long-format rows "dataset,task,subject,roi,metric,value", one per metric.
std::string csv_header();
std::string to_csv_rows(const MetricReport& report, const std::string& dataset_id);
nlohmann::ordered_json to_json(const MetricReport& report, const std::string& dataset_id);

}  // namespace neurotask::metrics
