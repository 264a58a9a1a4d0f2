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

// Cross-validated voxelwise ridge regression.
//
// The ridge problem  min_W,b ||Y - XW - 1b'||^2 + lambda ||W||^2  is solved
// in closed form: with column-centred Xc, Yc the weights satisfy
// (Xc'Xc + lambda I) W = Xc'Yc and the intercept is b = mean(Y) - W' mean(X).
// The dim x dim system depends only on the features, so it is factorised once
// per fold and applied to every voxel of every subject.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "neurotask/data_model.hpp"

namespace neurotask::encoder {

enum class Centering { kOn, kOff };

struct RidgeSolution {
  Matrix weights;    // dim x voxels
  Vector intercept;  // voxels
};

/// Factorised ridge system for one design matrix, reusable across targets.
class RidgeSystem {
 public:
  /// Throws InvalidArgument (negative lambda, empty X) or SingularSystem
  /// (lambda = 0 with a rank-deficient design).
  RidgeSystem(const Matrix& x, double lambda, Centering centering = Centering::kOn);

  /// Throws ShapeMismatch when y does not have samples() rows.
  RidgeSolution solve(const Matrix& y) const;

  std::size_t samples() const noexcept { return static_cast<std::size_t>(projector_.cols()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(projector_.rows()); }
  double lambda() const noexcept { return lambda_; }
  Centering centering() const noexcept { return centering_; }
  const Vector& feature_mean() const noexcept { return x_mean_; }

 private:
  double lambda_;
  Centering centering_;
  Vector x_mean_;
  Matrix projector_;  // (Xc'Xc + lambda I)^-1 Xc', dim x samples
};

RidgeSolution fit_ridge(const Matrix& x, const Matrix& y, double lambda,
                        Centering centering = Centering::kOn);

/// ||(Xc'Xc + lambda I) W - Xc'Yc||_F / ||Xc'Yc||_F (absolute when the
/// denominator vanishes).
double normal_equation_residual(const Matrix& x, const Matrix& y, double lambda,
                                const Matrix& weights, Centering centering = Centering::kOn);

/// Contiguous blocks in presentation order, sizes differing by at most one
/// with the larger blocks first. The shuffled scheme permutes sample order
/// with a seeded mt19937_64 Fisher-Yates pass before blocking. Throws InvalidK
/// unless 2 <= k <= n_samples.
FoldAssignment assign_folds(std::size_t n_samples, std::size_t k,
                            FoldScheme scheme = FoldScheme::kContiguous, std::uint64_t seed = 0);

struct StandardizationParams {
  Vector feature_mean;
  Vector feature_std;
  Vector response_mean;
  Vector response_std;
};

/// Column means and population standard deviations; near-constant columns
/// get std = 1 so they pass through unchanged.
void column_moments(const Matrix& m, Vector& mean, Vector& std);

struct RidgeModel {
  Matrix weights;  // dim x voxels, in standardised units when enabled
  Vector intercept;
  double lambda = 0.0;
  StandardizationParams standardization;
  std::size_t fold_id = 0;
};

struct EncodingRun {
  TaskId task;
  std::string subject_id;
  RoiSpec roi;
  EncodingConfig config;
  FoldAssignment folds;
  std::vector<RidgeModel> models;  // one per fold, ordered by fold id
  Matrix predictions;              // samples x voxels, out-of-fold
};

/// Feature-side work for one task under one fold plan: training-fold
/// standardisation and the factorised ridge system for each fold. Shared by
/// every (subject, ROI) unit of the task.
class CrossValidatedDesign {
 public:
  /// Throws InvalidK, InvalidArgument or SingularSystem.
  CrossValidatedDesign(const Matrix& features, const EncodingConfig& config,
                       std::size_t threads = 1);

  const EncodingConfig& config() const noexcept { return config_; }
  const FoldAssignment& folds() const noexcept { return folds_; }
  std::size_t samples() const noexcept { return folds_.n_samples; }
  std::size_t dim() const noexcept { return dim_; }

  struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    Vector feature_mean;
    Vector feature_std;
    Matrix test_features;  // standardised held-out rows
    RidgeSystem system;
  };
  const std::vector<Fold>& fold_data() const noexcept { return fold_data_; }

 private:
  EncodingConfig config_;
  FoldAssignment folds_;
  std::size_t dim_;
  std::vector<Fold> fold_data_;
};

/// Fits one model per fold on the training folds and predicts the held-out
/// samples, assembling an out-of-fold prediction matrix in response units.
EncodingRun run_encoding(const PairedDataset& pair, const EncodingConfig& config);

/// Same, reusing a precomputed design built from pair.features().values().
/// With keep_weights = false the per-fold weight matrices are dropped after
/// prediction to bound memory in batch runs.
EncodingRun run_encoding(const CrossValidatedDesign& design, const PairedDataset& pair,
                         bool keep_weights = true);

}  // namespace neurotask::encoder
