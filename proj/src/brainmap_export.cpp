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

#include "neurotask/brainmap_export.hpp"

#include "neurotask/encoder.hpp"
#include "neurotask/error.hpp"
#include "neurotask/format.hpp"
#include "neurotask/metrics.hpp"

namespace neurotask::brainmap {

std::string_view to_string(VoxelMetric m) noexcept {
  return m == VoxelMetric::kMae ? "mae" : "pearson";
}

std::optional<VoxelMetric> parse_voxel_metric(std::string_view t) noexcept {
  if (t == "mae") return VoxelMetric::kMae;
  if (t == "pearson") return VoxelMetric::kPearson;
  return std::nullopt;
}

Vector VoxelScoreTable::scores() const {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = rows[i].score;
  return out;
}

VoxelScoreTable export_voxel_scores(const TaskId& task, const std::string& subject_id,
                                    const std::vector<RoiScores>& rois, VoxelMetric metric) {
  if (rois.empty()) fail(ErrorKind::kMissingScores, "no ROI scores to export");
  VoxelScoreTable table;
  table.metric = metric;
  table.task = task;
  table.subject_id = subject_id;
  for (const auto& r : rois) {
    const auto n = static_cast<std::size_t>(r.scores.size());
    if (n == 0 || n != r.roi.voxel_count) {
      fail(ErrorKind::kMissingScores, "ROI '" + r.roi.name + "' has " + std::to_string(n) +
                                          " scores for " + std::to_string(r.roi.voxel_count) +
                                          " voxels");
    }
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      VoxelScoreRow row;
      row.voxel_index = v;
      if (r.roi.atlas_label_ids) row.atlas_label = (*r.roi.atlas_label_ids)[v];
      row.roi_name = r.roi.name;
      row.score = r.scores(static_cast<Eigen::Index>(v));
      total += row.score;
      table.rows.push_back(std::move(row));
    }
    table.summary.push_back({r.roi.name, total / static_cast<double>(n), n});
  }
  return table;
}

VoxelScoreTable export_voxel_scores(const std::vector<const encoder::EncodingRun*>& runs,
                                    const std::vector<const Matrix*>& actuals, VoxelMetric metric) {
  if (runs.empty() || runs.size() != actuals.size()) {
    fail(ErrorKind::kMissingScores, "each run needs its actual responses");
  }
  std::vector<RoiScores> rois;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& run = *runs[i];
    if (run.task != runs.front()->task || run.subject_id != runs.front()->subject_id) {
      fail(ErrorKind::kInvalidArgument, "runs mix tasks or subjects");
    }
    Vector scores = metric == VoxelMetric::kMae
                        ? metrics::per_voxel_mae(*actuals[i], run.predictions)
                        : metrics::per_voxel_pearson(*actuals[i], run.predictions).scores;
    rois.push_back({run.roi, std::move(scores)});
  }
  return export_voxel_scores(runs.front()->task, runs.front()->subject_id, rois, metric);
}

std::string to_csv(const VoxelScoreTable& table) {
  std::string out = "voxel_index,atlas_label,roi_name,task,subject,metric,score\n";
  const std::string tail = "," + std::string(table.task.code_string()) + "," +
                           csv_escape(table.subject_id) + "," + std::string(to_string(table.metric)) +
                           ",";
  for (const auto& row : table.rows) {
    out += std::to_string(row.voxel_index) + "," +
           (row.atlas_label ? std::to_string(*row.atlas_label) : std::string()) + "," +
           csv_escape(row.roi_name) + tail + format_double(row.score) + "\n";
  }
  return out;
}

std::string summary_csv(const VoxelScoreTable& table) {
  std::string out = "roi,mean_" + std::string(to_string(table.metric)) + ",voxels\n";
  for (const auto& s : table.summary) {
    out += csv_escape(s.roi_name) + "," + format_double(s.mean) + "," + std::to_string(s.voxels) + "\n";
  }
  return out;
}

}  // namespace neurotask::brainmap
