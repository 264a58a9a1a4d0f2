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

// Boundary I/O: interchange arrays (NPY v1.0 and CSV) and the JSON
// experiment manifest. Everything read here is validated before it reaches
// the numeric code.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "neurotask/data_model.hpp"

namespace neurotask {

enum class ArrayFormat { kNpy, kCsv };

/// Encodes a matrix as an NPY v1.0 file image ('<f8', C order, 2-D).
std::string encode_npy(const Matrix& m);
/// Decodes an NPY v1.0/v2.0 image. Throws CorruptHeader, UnsupportedDtype or
/// UnsupportedRank.
Matrix decode_npy(std::string_view bytes);

/// Parses CSV text with a one-line header. Throws ParseError.
Matrix decode_csv(std::string_view text);
std::string encode_csv(const Matrix& m);

/// Reads NPY when the file starts with the NPY magic, CSV otherwise.
Matrix read_array(const std::filesystem::path& path);

/// Throws EmptyMatrix for 0-sized input, NonFiniteValues, IoError.
void write_array(const Matrix& m, const std::filesystem::path& path,
                 ArrayFormat format = ArrayFormat::kNpy);

/// One identifier per line; blank lines ignored.
std::vector<std::string> read_sample_ids(const std::filesystem::path& path);
void write_sample_ids(const std::vector<std::string>& ids, const std::filesystem::path& path);

struct TaskEntry {
  TaskId task;
  std::filesystem::path feature_path;
  std::size_t dim = 0;
  std::optional<std::filesystem::path> sample_ids_path;
  /// Settings recorded by the feature extractor (pooling, layer, windowing).
  nlohmann::ordered_json extraction = nlohmann::ordered_json::object();
};

struct RoiEntry {
  RoiSpec roi;
  std::filesystem::path response_path;
  std::optional<std::filesystem::path> sample_ids_path;
};

struct SubjectEntry {
  std::string subject_id;
  std::vector<RoiEntry> rois;
};

struct Manifest {
  std::string dataset_id;
  std::filesystem::path base_dir;
  std::optional<std::filesystem::path> sample_ids_path;
  std::vector<SubjectEntry> subjects;
  std::vector<TaskEntry> tasks;
  EncodingConfig defaults;
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();

  std::size_t response_count() const;
  const TaskEntry* find_task(TaskCode code) const;
  const SubjectEntry* find_subject(std::string_view id) const;
};

/// Throws ParseError, MissingFile, or SchemaViolation naming the offending
/// field path (e.g. "subjects[1].rois[0].voxel_count").
Manifest load_manifest(const std::filesystem::path& path);
/// Validates an already-parsed document; relative paths resolve against
/// `base_dir`.
Manifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);
/// Inverse of parse_manifest, with paths written relative to base_dir.
nlohmann::ordered_json manifest_to_json(const Manifest& m);

FeatureMatrix load_features(const Manifest& m, const TaskEntry& task);
ResponseMatrix load_responses(const Manifest& m, const SubjectEntry& subject,
                              const RoiEntry& roi);

}  // namespace neurotask
