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

// Per-voxel score tables keyed to atlas labels, for rendering brain maps in
// external tools, plus per-ROI summary means.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "neurotask/data_model.hpp"

namespace neurotask::encoder {
struct EncodingRun;
}

namespace neurotask::brainmap {

enum class VoxelMetric { kMae, kPearson };
std::string_view to_string(VoxelMetric m) noexcept;
std::optional<VoxelMetric> parse_voxel_metric(std::string_view token) noexcept;

struct VoxelScoreRow {
  std::size_t voxel_index = 0;  // position within its ROI
  std::optional<std::int64_t> atlas_label;
  std::string roi_name;
  double score = 0.0;
};

struct RoiSummary {
  std::string roi_name;
  double mean = 0.0;
  std::size_t voxels = 0;
};

struct VoxelScoreTable {
  VoxelMetric metric = VoxelMetric::kMae;
  TaskId task;
  std::string subject_id;
  std::vector<VoxelScoreRow> rows;
  std::vector<RoiSummary> summary;  // one entry per ROI, input order

  /// Scores of every row, in row order.
  Vector scores() const;
};

struct RoiScores {
  RoiSpec roi;
  Vector scores;  // one per voxel
};

/// Throws MissingScores when an ROI has no scores or the wrong number.
VoxelScoreTable export_voxel_scores(const TaskId& task, const std::string& subject_id,
                                    const std::vector<RoiScores>& rois, VoxelMetric metric);

/// Scores the runs (all for one task and subject) against their actual
/// responses, then exports.
VoxelScoreTable export_voxel_scores(const std::vector<const encoder::EncodingRun*>& runs,
                                    const std::vector<const Matrix*>& actuals, VoxelMetric metric);

/// Columns: voxel_index,atlas_label,roi_name,task,subject,metric,score
std::string to_csv(const VoxelScoreTable& table);
/// Columns: roi,mean_<metric>,voxels
std::string summary_csv(const VoxelScoreTable& table);

}  // namespace neurotask::brainmap
