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

// Stage-wise batch pipeline over a manifest. Each stage reads the persisted
// outputs of the previous one from the output directory, so the expensive
// encoding step runs once and the analyses can be repeated cheaply:
//
//   encode     -> runs/<task>/<subject>/<roi>.predictions.npy
//   evaluate   -> metrics/metrics.csv, metrics/voxels/<task>/<subject>/<roi>.<score>.npy
//   stats      -> stats/main_effects.csv, stats/pairwise_<metric>_<roi>.csv
//   similarity -> similarity/<mode>/{similarity.csv,heatmap.svg,dendrogram.*}
//   report     -> report/mean_metrics.csv, report/bar_<metric>.svg
//   brainmap   -> brainmap/<metric>/<task>__<subject>.{csv,summary.csv,npy}
//
// Every output file gets a "<file>.meta.json" provenance sidecar. Outputs are
// byte-identical for identical inputs regardless of the worker count.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "neurotask/brainmap_export.hpp"
#include "neurotask/data_model.hpp"
#include "neurotask/ingest.hpp"
#include "neurotask/taskonomy.hpp"

namespace neurotask::pipeline {

struct Filters {
  std::vector<std::string> tasks;     // empty selects everything
  std::vector<std::string> subjects;
  std::vector<std::string> rois;
};

struct RunPlan {
  Manifest manifest;
  std::vector<const TaskEntry*> tasks;
  std::vector<const SubjectEntry*> subjects;
  std::vector<std::string> rois;  // ROI names, manifest order
  EncodingConfig config;
  std::filesystem::path output_dir;
  std::size_t threads = 1;
  taskonomy::Linkage linkage = taskonomy::Linkage::kAverage;
  taskonomy::SimilarityMode similarity_mode = taskonomy::SimilarityMode::kPredictionScore;
  std::optional<std::size_t> correction_family;  // default: number of pairs
  bool stats_include_baseline = false;
  bool save_weights = false;
  brainmap::VoxelMetric brainmap_metric = brainmap::VoxelMetric::kMae;
  std::function<void(const std::string&)> log;  // progress lines; may be empty

  RunPlan() = default;
  RunPlan(const RunPlan&) = delete;
  RunPlan& operator=(const RunPlan&) = delete;
  RunPlan(RunPlan&&) = default;

  struct Unit {
    const TaskEntry* task;
    const SubjectEntry* subject;
    const RoiEntry* roi;
  };
  /// (task, subject, roi) triples in manifest order, task-major.
  std::vector<Unit> units() const;
};

/// Resolves filters against the manifest. The returned plan owns the
/// manifest; `config` starts from the manifest defaults. Throws FilterEmpty
/// when a filter token matches nothing or a selection ends up empty.
RunPlan make_plan(Manifest manifest, const Filters& filters, std::filesystem::path output_dir);

struct StageSummary {
  std::size_t units = 0;
  std::vector<std::filesystem::path> files;  // primary outputs, sidecars excluded
};

StageSummary cmd_encode(const RunPlan& plan);
StageSummary cmd_evaluate(const RunPlan& plan);
StageSummary cmd_stats(const RunPlan& plan);
StageSummary cmd_similarity(const RunPlan& plan);
StageSummary cmd_report(const RunPlan& plan);
StageSummary cmd_brainmap(const RunPlan& plan);

std::filesystem::path run_predictions_path(const RunPlan& plan, const RunPlan::Unit& u);
std::filesystem::path metrics_csv_path(const RunPlan& plan);

/// Parameters for a synthetic dataset shaped like the reading (sentences,
/// 5 subjects, 9 ROIs) or listening (TRs, 10 ROIs) corpora.
struct SynthSpec {
  enum class Shape { kReading, kListening };
  Shape shape = Shape::kReading;
  std::size_t samples = 0;   // 0: 627 for reading, 259 for listening
  std::size_t subjects = 0;  // 0: 5 for reading, 82 for listening
  std::size_t dim = 768;
  double voxel_scale = 1.0;  // ROI voxel counts are scaled by this (min 1)
  std::uint64_t seed = 0;
  bool include_baseline = true;
};

/// Writes features, responses, sample ids and manifest.json under `dir` and
/// returns the manifest path. The manifest notes record the scaling.
std::filesystem::path synthesize_dataset(const SynthSpec& spec, const std::filesystem::path& dir);

}  // namespace neurotask::pipeline
