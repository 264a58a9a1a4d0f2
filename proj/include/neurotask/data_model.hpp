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

// Shared domain types. Everything here is validated on construction and
// immutable afterwards, so instances can be shared across worker threads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace neurotask {

/// Row-major so that one sample (or one voxel row after transposition) is a
/// contiguous span, matching the C-order interchange files.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class TaskCode { kCR, kNER, kNLI, kPD, kQA, kSA, kSRL, kSS, kSum, kWSD, kBASE };

inline constexpr TaskCode kAllTaskCodes[] = {
    TaskCode::kCR, TaskCode::kNER, TaskCode::kNLI, TaskCode::kPD,  TaskCode::kQA,  TaskCode::kSA,
    TaskCode::kSRL, TaskCode::kSS, TaskCode::kSum, TaskCode::kWSD, TaskCode::kBASE};

/// Short code as written in manifests and reports ("CR", "Sum", "BASE", ...).
std::string_view to_string(TaskCode code) noexcept;
std::optional<TaskCode> parse_task_code(std::string_view token) noexcept;

struct TaskId {
  TaskCode code = TaskCode::kBASE;
  std::string display_name;

  /// Uses the conventional long name for the code.
  static TaskId from_code(TaskCode code);
  /// Throws SchemaViolation for unknown tokens.
  static TaskId parse(std::string_view token, std::string display_name = {});

  std::string_view code_string() const noexcept { return to_string(code); }
  bool is_baseline() const noexcept { return code == TaskCode::kBASE; }

  friend bool operator==(const TaskId& a, const TaskId& b) noexcept { return a.code == b.code; }
  friend auto operator<=>(const TaskId& a, const TaskId& b) noexcept { return a.code <=> b.code; }
};

enum class Hemisphere { kLeft, kRight, kNA };
std::string_view to_string(Hemisphere h) noexcept;
std::optional<Hemisphere> parse_hemisphere(std::string_view token) noexcept;

struct RoiSpec {
  std::string name;
  Hemisphere hemisphere = Hemisphere::kNA;
  std::size_t voxel_count = 0;
  std::string atlas;
  std::optional<std::vector<std::int64_t>> atlas_label_ids;

  /// Throws SchemaViolation when voxel_count is zero or the label list has
  /// the wrong length.
  void validate() const;
  friend bool operator==(const RoiSpec&, const RoiSpec&) = default;
};

class FeatureMatrix {
 public:
  /// Throws EmptyMatrix, NonFiniteValues, LengthMismatch (ids vs rows) or
  /// MismatchedSamples (duplicate ids).
  FeatureMatrix(TaskId task, Matrix values, std::vector<std::string> sample_ids,
                std::string dataset_id = {});

  const TaskId& task() const noexcept { return task_; }
  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  const std::string& dataset_id() const noexcept { return dataset_id_; }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.cols()); }

 private:
  TaskId task_;
  Matrix values_;
  std::vector<std::string> sample_ids_;
  std::string dataset_id_;
};

class ResponseMatrix {
 public:
  /// Same checks as FeatureMatrix plus ShapeMismatch when the column count
  /// differs from roi.voxel_count.
  ResponseMatrix(std::string subject_id, RoiSpec roi, Matrix values,
                 std::vector<std::string> sample_ids);

  const std::string& subject_id() const noexcept { return subject_id_; }
  const RoiSpec& roi() const noexcept { return roi_; }
  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }
  std::size_t samples() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t voxels() const noexcept { return static_cast<std::size_t>(values_.cols()); }

 private:
  std::string subject_id_;
  RoiSpec roi_;
  Matrix values_;
  std::vector<std::string> sample_ids_;
};

enum class FoldScheme { kContiguous, kShuffled };
enum class Standardize { kTrainFoldZScore, kNone };
enum class PcMode { kPerSample, kPerVoxel };

std::string_view to_string(FoldScheme s) noexcept;
std::string_view to_string(Standardize s) noexcept;
std::string_view to_string(PcMode m) noexcept;
std::optional<FoldScheme> parse_fold_scheme(std::string_view token) noexcept;
std::optional<Standardize> parse_standardize(std::string_view token) noexcept;
std::optional<PcMode> parse_pc_mode(std::string_view token) noexcept;

struct FoldAssignment {
  std::size_t n_samples = 0;
  std::size_t k = 0;
  std::vector<std::size_t> fold_of_sample;

  std::vector<std::size_t> fold_sizes() const;
  /// Sample indices held out in `fold`, ascending.
  std::vector<std::size_t> test_indices(std::size_t fold) const;
  /// Sample indices used for training when `fold` is held out, ascending.
  std::vector<std::size_t> train_indices(std::size_t fold) const;

  friend bool operator==(const FoldAssignment&, const FoldAssignment&) = default;
};

struct EncodingConfig {
  double lambda = 1.0;
  std::size_t k_folds = 10;
  Standardize standardize = Standardize::kTrainFoldZScore;
  PcMode pc_mode = PcMode::kPerSample;
  FoldScheme fold_scheme = FoldScheme::kContiguous;
  std::uint64_t seed = 0;

  /// lambda >= 0 (and finite), 2 <= k_folds <= n_samples. Throws
  /// InvalidArgument or InvalidK.
  void validate(std::size_t n_samples) const;
  friend bool operator==(const EncodingConfig&, const EncodingConfig&) = default;
};

/// Non-owning view over an aligned feature/response pair. The referenced
/// matrices must outlive the view.
class PairedDataset {
 public:
  const FeatureMatrix& features() const noexcept { return *features_; }
  const ResponseMatrix& responses() const noexcept { return *responses_; }
  std::size_t n_samples() const noexcept { return features_->samples(); }
  std::size_t dim() const noexcept { return features_->dim(); }
  std::size_t voxels() const noexcept { return responses_->voxels(); }

 private:
  friend PairedDataset validate_pairing(const FeatureMatrix&, const ResponseMatrix&);
  PairedDataset(const FeatureMatrix& f, const ResponseMatrix& r) : features_(&f), responses_(&r) {}

  const FeatureMatrix* features_;
  const ResponseMatrix* responses_;
};

/// Pairs features with responses when their sample ids agree in content and
/// order. Throws MismatchedSamples otherwise.
PairedDataset validate_pairing(const FeatureMatrix& features, const ResponseMatrix& responses);

/// Throws NonFiniteValues if any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

}  // namespace neurotask
