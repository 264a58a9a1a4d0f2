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

// Task-by-task similarity (from per-voxel prediction scores or from the
// stimulus representations themselves), agglomerative clustering of the
// resulting matrix, and the exports: CSV/SVG heatmaps and Newick/JSON/SVG
// dendrograms.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "neurotask/data_model.hpp"

namespace neurotask::taskonomy {

enum class SimilarityMode { kPredictionScore, kPredictionValues, kRepresentationRsa };
enum class Linkage { kAverage, kComplete, kSingle };

std::string_view to_string(SimilarityMode m) noexcept;
std::string_view to_string(Linkage l) noexcept;
std::optional<SimilarityMode> parse_similarity_mode(std::string_view token) noexcept;
std::optional<Linkage> parse_linkage(std::string_view token) noexcept;

struct TaskSimilarity {
  std::vector<TaskId> tasks;
  Eigen::MatrixXd matrix;  // tasks x tasks, symmetric, unit diagonal
  SimilarityMode mode = SimilarityMode::kPredictionScore;
};

using TaskScores = std::vector<std::pair<TaskId, Vector>>;

/// Entry (a, b) is the Pearson correlation of the two tasks' per-voxel score
/// vectors. Throws EmptyInput, LengthMismatch (unequal or shorter than 3) or
/// ZeroVariance.
TaskSimilarity prediction_similarity(const TaskScores& per_task_scores,
                                     SimilarityMode mode = SimilarityMode::kPredictionScore);

/// Upper triangle (row-major, diagonal excluded) of the samples x samples
/// Pearson correlation matrix between stimulus representations.
Vector rsa_upper_triangle(const Matrix& features);

/// RSA similarity: correlation between tasks' representational
/// dissimilarity structure. Throws MismatchedSamples when the feature
/// matrices do not share sample ids in order.
TaskSimilarity representation_similarity(const std::vector<const FeatureMatrix*>& per_task_features);

/// Elementwise mean of matrices over identical task lists (e.g. across
/// subjects).
TaskSimilarity average_similarity(const std::vector<TaskSimilarity>& items);

struct Merge {
  std::size_t left = 0;   // node id: leaves are 0..n-1, merge t creates node n+t
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;   // leaves under the new node

  friend bool operator==(const Merge&, const Merge&) = default;
};

struct Dendrogram {
  std::vector<std::string> leaves;
  std::vector<Merge> merges;
  Linkage linkage = Linkage::kAverage;
};

/// Agglomerative clustering of a symmetric distance matrix with
/// Lance-Williams updates. Among pairs at the minimum distance the one with
/// the lexicographically smallest (left, right) smallest-leaf-index pair
/// merges first; the left node is the one holding the smaller leaf index.
Dendrogram agglomerate(const Eigen::MatrixXd& distances, std::vector<std::string> labels,
                       Linkage linkage = Linkage::kAverage);

/// Clusters tasks on distance 1 - similarity. Throws EmptyInput.
Dendrogram cluster(const TaskSimilarity& similarity, Linkage linkage = Linkage::kAverage);

/// Leaf indices in left-to-right drawing order.
std::vector<std::size_t> leaf_order(const Dendrogram& d);

/// Newick with branch length = parent height / 2 - child height / 2, e.g.
/// "((A:0.5,B:0.5):1.75,C:2.25);". Lengths are printed in extended precision
/// so that parse_newick recovers every merge height exactly.
std::string to_newick(const Dendrogram& d);

/// Rebuilds the merge list from a Newick string written by to_newick.
/// Merges are ordered by height, children before parents. Throws ParseError.
Dendrogram parse_newick(std::string_view text, Linkage linkage = Linkage::kAverage);

std::string similarity_csv(const TaskSimilarity& s);
std::string heatmap_svg(const TaskSimilarity& s, std::string_view title);
nlohmann::ordered_json to_json(const Dendrogram& d);
std::string dendrogram_svg(const Dendrogram& d, std::string_view title);

}  // namespace neurotask::taskonomy
