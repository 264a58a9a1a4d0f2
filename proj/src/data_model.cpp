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

#include "neurotask/data_model.hpp"

#include <cmath>
#include <unordered_set>

#include "neurotask/error.hpp"

namespace neurotask {

std::string_view to_string(TaskCode code) noexcept {
  switch (code) {
    case TaskCode::kCR: return "CR";
    case TaskCode::kNER: return "NER";
    case TaskCode::kNLI: return "NLI";
    case TaskCode::kPD: return "PD";
    case TaskCode::kQA: return "QA";
    case TaskCode::kSA: return "SA";
    case TaskCode::kSRL: return "SRL";
    case TaskCode::kSS: return "SS";
    case TaskCode::kSum: return "Sum";
    case TaskCode::kWSD: return "WSD";
    case TaskCode::kBASE: return "BASE";
  }
  return "?";
}

std::optional<TaskCode> parse_task_code(std::string_view token) noexcept {
  for (TaskCode c : kAllTaskCodes) {
    if (to_string(c) == token) return c;
  }
  return std::nullopt;
}

namespace {

std::string_view long_name(TaskCode code) {
  switch (code) {
    case TaskCode::kCR: return "Coreference Resolution";
    case TaskCode::kNER: return "Named Entity Recognition";
    case TaskCode::kNLI: return "Natural Language Inference";
    case TaskCode::kPD: return "Paraphrase Detection";
    case TaskCode::kQA: return "Question Answering";
    case TaskCode::kSA: return "Sentiment Analysis";
    case TaskCode::kSRL: return "Semantic Role Labeling";
    case TaskCode::kSS: return "Shallow Syntax Parsing";
    case TaskCode::kSum: return "Summarization";
    case TaskCode::kWSD: return "Word Sense Disambiguation";
    case TaskCode::kBASE: return "Pretrained Baseline";
  }
  return "";
}

void check_ids(const std::vector<std::string>& ids, std::size_t rows, std::string_view what) {
  if (ids.size() != rows) {
    fail(ErrorKind::kLengthMismatch, std::string(what) + ": " + std::to_string(ids.size()) +
                                         " sample ids for " + std::to_string(rows) + " rows");
  }
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      fail(ErrorKind::kMismatchedSamples, std::string(what) + ": duplicate sample id '" + id + "'");
    }
  }
}

}  // namespace

TaskId TaskId::from_code(TaskCode code) { return TaskId{code, std::string(long_name(code))}; }

TaskId TaskId::parse(std::string_view token, std::string display_name) {
  auto code = parse_task_code(token);
  if (!code) fail(ErrorKind::kSchemaViolation, "unknown task code '" + std::string(token) + "'");
  TaskId id = from_code(*code);
  if (!display_name.empty()) id.display_name = std::move(display_name);
  return id;
}

std::string_view to_string(Hemisphere h) noexcept {
  switch (h) {
    case Hemisphere::kLeft: return "L";
    case Hemisphere::kRight: return "R";
    case Hemisphere::kNA: return "NA";
  }
  return "NA";
}

std::optional<Hemisphere> parse_hemisphere(std::string_view token) noexcept {
  if (token == "L") return Hemisphere::kLeft;
  if (token == "R") return Hemisphere::kRight;
  if (token == "NA") return Hemisphere::kNA;
  return std::nullopt;
}

void RoiSpec::validate() const {
  if (name.empty()) fail(ErrorKind::kSchemaViolation, "ROI name is empty");
  if (voxel_count < 1) fail(ErrorKind::kSchemaViolation, "ROI '" + name + "' has no voxels");
  if (atlas_label_ids && atlas_label_ids->size() != voxel_count) {
    fail(ErrorKind::kSchemaViolation, "ROI '" + name + "': " +
                                          std::to_string(atlas_label_ids->size()) +
                                          " atlas labels for " + std::to_string(voxel_count) +
                                          " voxels");
  }
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) fail(ErrorKind::kNonFiniteValues, std::string(what) + " contains NaN or Inf");
}

FeatureMatrix::FeatureMatrix(TaskId task, Matrix values, std::vector<std::string> sample_ids,
                             std::string dataset_id)
    : task_(std::move(task)),
      values_(std::move(values)),
      sample_ids_(std::move(sample_ids)),
      dataset_id_(std::move(dataset_id)) {
  const std::string what = "features for task " + std::string(task_.code_string());
  if (values_.size() == 0) fail(ErrorKind::kEmptyMatrix, what + " are empty");
  require_finite(values_, what);
  check_ids(sample_ids_, samples(), what);
}

ResponseMatrix::ResponseMatrix(std::string subject_id, RoiSpec roi, Matrix values,
                               std::vector<std::string> sample_ids)
    : subject_id_(std::move(subject_id)),
      roi_(std::move(roi)),
      values_(std::move(values)),
      sample_ids_(std::move(sample_ids)) {
  const std::string what = "responses for " + subject_id_ + "/" + roi_.name;
  roi_.validate();
  if (values_.size() == 0) fail(ErrorKind::kEmptyMatrix, what + " are empty");
  if (voxels() != roi_.voxel_count) {
    fail(ErrorKind::kShapeMismatch, what + ": " + std::to_string(voxels()) +
                                        " columns but ROI declares " +
                                        std::to_string(roi_.voxel_count) + " voxels");
  }
  require_finite(values_, what);
  check_ids(sample_ids_, samples(), what);
}

std::string_view to_string(FoldScheme s) noexcept {
  return s == FoldScheme::kContiguous ? "contiguous" : "shuffled";
}
std::string_view to_string(Standardize s) noexcept {
  return s == Standardize::kTrainFoldZScore ? "zscore" : "none";
}
std::string_view to_string(PcMode m) noexcept {
  return m == PcMode::kPerSample ? "per-sample" : "per-voxel";
}
std::optional<FoldScheme> parse_fold_scheme(std::string_view t) noexcept {
  if (t == "contiguous") return FoldScheme::kContiguous;
  if (t == "shuffled") return FoldScheme::kShuffled;
  return std::nullopt;
}
std::optional<Standardize> parse_standardize(std::string_view t) noexcept {
  if (t == "zscore") return Standardize::kTrainFoldZScore;
  if (t == "none") return Standardize::kNone;
  return std::nullopt;
}
std::optional<PcMode> parse_pc_mode(std::string_view t) noexcept {
  if (t == "per-sample") return PcMode::kPerSample;
  if (t == "per-voxel") return PcMode::kPerVoxel;
  return std::nullopt;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (std::size_t f : fold_of_sample) ++sizes.at(f);
  return sizes;
}

std::vector<std::size_t> FoldAssignment::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of_sample.size(); ++i) {
    if (fold_of_sample[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of_sample.size(); ++i) {
    if (fold_of_sample[i] != fold) out.push_back(i);
  }
  return out;
}

void EncodingConfig::validate(std::size_t n_samples) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::kInvalidArgument, "lambda must be a finite nonnegative number");
  }
  if (k_folds < 2 || k_folds > n_samples) {
    fail(ErrorKind::kInvalidK, "k_folds=" + std::to_string(k_folds) + " must lie in [2, " +
                                   std::to_string(n_samples) + "]");
  }
}

PairedDataset validate_pairing(const FeatureMatrix& features, const ResponseMatrix& responses) {
  const auto& a = features.sample_ids();
  const auto& b = responses.sample_ids();
  if (a.size() != b.size()) {
    fail(ErrorKind::kMismatchedSamples, "feature rows (" + std::to_string(a.size()) +
                                            ") and response rows (" + std::to_string(b.size()) +
                                            ") differ");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) {
      fail(ErrorKind::kMismatchedSamples, "sample " + std::to_string(i) + " is '" + a[i] +
                                              "' in features but '" + b[i] + "' in responses");
    }
  }
  return PairedDataset(features, responses);
}

}  // namespace neurotask
