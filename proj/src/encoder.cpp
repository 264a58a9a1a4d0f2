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

#include "neurotask/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <random>

#include "neurotask/error.hpp"
#include "neurotask/parallel.hpp"

namespace neurotask::encoder {

namespace {

Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

void standardize_in_place(Matrix& m, const Vector& mean, const Vector& std) {
  m.rowwise() -= mean.transpose();
  m.array().rowwise() /= std.transpose().array();
}

// Unbiased draw from [0, bound) using rejection, so the permutation depends
// only on the mt19937_64 stream and not on the standard library.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

}  // namespace

RidgeSystem::RidgeSystem(const Matrix& x, double lambda, Centering centering)
    : lambda_(lambda), centering_(centering) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::kInvalidArgument, "lambda must be a finite nonnegative number");
  }
  if (x.size() == 0) fail(ErrorKind::kInvalidArgument, "empty design matrix");
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();

  Matrix xc = x;
  if (centering == Centering::kOn) {
    x_mean_ = x.colwise().mean().transpose();
    xc.rowwise() -= x_mean_.transpose();
  } else {
    x_mean_ = Vector::Zero(d);
  }

  if (lambda == 0.0) {
    const Eigen::Index max_rank = centering == Centering::kOn ? n - 1 : n;
    if (d > max_rank) {
      fail(ErrorKind::kSingularSystem, "lambda = 0 with " + std::to_string(d) +
                                           " features but at most rank " + std::to_string(max_rank));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
    if (qr.rank() < d) {
      fail(ErrorKind::kSingularSystem, "lambda = 0 with a rank-deficient design (rank " +
                                           std::to_string(qr.rank()) + " < " + std::to_string(d) + ")");
    }
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(xc.transpose());
  gram.diagonal().array() += lambda;

  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    projector_ = llt.solve(xc.transpose());
  } else {
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < d) fail(ErrorKind::kSingularSystem, "ridge system is singular");
    projector_ = svd.solve(Eigen::MatrixXd(xc.transpose()));
  }
}

RidgeSolution RidgeSystem::solve(const Matrix& y) const {
  if (static_cast<std::size_t>(y.rows()) != samples()) {
    fail(ErrorKind::kShapeMismatch, "targets have " + std::to_string(y.rows()) +
                                        " rows, design has " + std::to_string(samples()));
  }
  RidgeSolution out;
  if (centering_ == Centering::kOn) {
    const Vector y_mean = y.colwise().mean().transpose();
    Matrix yc = y;
    yc.rowwise() -= y_mean.transpose();
    out.weights.noalias() = projector_ * yc;
    out.intercept = y_mean - out.weights.transpose() * x_mean_;
  } else {
    out.weights.noalias() = projector_ * y;
    out.intercept = Vector::Zero(y.cols());
  }
  return out;
}

RidgeSolution fit_ridge(const Matrix& x, const Matrix& y, double lambda, Centering centering) {
  if (x.rows() != y.rows()) {
    fail(ErrorKind::kShapeMismatch, "X has " + std::to_string(x.rows()) + " rows, Y has " +
                                        std::to_string(y.rows()));
  }
  require_finite(x, "X");
  require_finite(y, "Y");
  return RidgeSystem(x, lambda, centering).solve(y);
}

double normal_equation_residual(const Matrix& x, const Matrix& y, double lambda,
                                const Matrix& weights, Centering centering) {
  Matrix xc = x;
  Matrix yc = y;
  if (centering == Centering::kOn) {
    xc.rowwise() -= x.colwise().mean();
    yc.rowwise() -= y.colwise().mean();
  }
  const Matrix rhs = xc.transpose() * yc;
  const Matrix lhs = xc.transpose() * (xc * weights) + lambda * weights;
  const double num = (lhs - rhs).norm();
  const double den = rhs.norm();
  return den > 0 ? num / den : num;
}

FoldAssignment assign_folds(std::size_t n_samples, std::size_t k, FoldScheme scheme,
                            std::uint64_t seed) {
  if (k < 2 || k > n_samples) {
    fail(ErrorKind::kInvalidK, "k=" + std::to_string(k) + " must lie in [2, " +
                                   std::to_string(n_samples) + "]");
  }
  std::vector<std::size_t> order(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;
  if (scheme == FoldScheme::kShuffled) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = n_samples - 1; i > 0; --i) {
      std::swap(order[i], order[bounded(rng, i + 1)]);
    }
  }
  FoldAssignment out{n_samples, k, std::vector<std::size_t>(n_samples)};
  const std::size_t base = n_samples / k;
  const std::size_t extra = n_samples % k;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = base + (f < extra ? 1 : 0);
    for (std::size_t j = 0; j < size; ++j) out.fold_of_sample[order[pos++]] = f;
  }
  return out;
}

void column_moments(const Matrix& m, Vector& mean, Vector& std) {
  const double n = static_cast<double>(m.rows());
  mean = m.colwise().mean().transpose();
  std = ((m.rowwise() - mean.transpose()).array().square().colwise().sum() / n).sqrt().transpose();
  for (Eigen::Index j = 0; j < std.size(); ++j) {
    if (!(std(j) > 1e-12 * std::max(1.0, std::abs(mean(j))))) std(j) = 1.0;
  }
}

CrossValidatedDesign::CrossValidatedDesign(const Matrix& features, const EncodingConfig& config,
                                           std::size_t threads)
    : config_(config), dim_(static_cast<std::size_t>(features.cols())) {
  const auto n = static_cast<std::size_t>(features.rows());
  config.validate(n);
  folds_ = assign_folds(n, config.k_folds, config.fold_scheme, config.seed);

  std::vector<std::optional<Fold>> slots(config.k_folds);
  parallel_for(config.k_folds, threads, [&](std::size_t f) {
    auto train = folds_.train_indices(f);
    auto test = folds_.test_indices(f);
    Matrix x_train = select_rows(features, train);
    Matrix x_test = select_rows(features, test);
    Vector mean;
    Vector std;
    if (config.standardize == Standardize::kTrainFoldZScore) {
      column_moments(x_train, mean, std);
      standardize_in_place(x_train, mean, std);
      standardize_in_place(x_test, mean, std);
    } else {
      mean = Vector::Zero(features.cols());
      std = Vector::Ones(features.cols());
    }
    RidgeSystem system(x_train, config.lambda, Centering::kOn);
    slots[f].emplace(Fold{std::move(train), std::move(test), std::move(mean), std::move(std),
                          std::move(x_test), std::move(system)});
  });
  fold_data_.reserve(slots.size());
  for (auto& s : slots) fold_data_.push_back(std::move(*s));
}

EncodingRun run_encoding(const CrossValidatedDesign& design, const PairedDataset& pair,
                         bool keep_weights) {
  const Matrix& y = pair.responses().values();
  if (design.samples() != pair.n_samples() || design.dim() != pair.dim()) {
    fail(ErrorKind::kShapeMismatch, "design was built for different features");
  }
  const auto& config = design.config();

  EncodingRun run;
  run.task = pair.features().task();
  run.subject_id = pair.responses().subject_id();
  run.roi = pair.responses().roi();
  run.config = config;
  run.folds = design.folds();
  run.predictions = Matrix::Zero(y.rows(), y.cols());

  std::vector<char> written(pair.n_samples(), 0);
  for (std::size_t f = 0; f < design.fold_data().size(); ++f) {
    const auto& fold = design.fold_data()[f];
    Matrix y_train = select_rows(y, fold.train);
    Vector y_mean;
    Vector y_std;
    if (config.standardize == Standardize::kTrainFoldZScore) {
      column_moments(y_train, y_mean, y_std);
      standardize_in_place(y_train, y_mean, y_std);
    } else {
      y_mean = Vector::Zero(y.cols());
      y_std = Vector::Ones(y.cols());
    }
    RidgeSolution sol = fold.system.solve(y_train);

    Matrix pred = fold.test_features * sol.weights;
    pred.rowwise() += sol.intercept.transpose();
    if (config.standardize == Standardize::kTrainFoldZScore) {
      pred.array().rowwise() *= y_std.transpose().array();
      pred.rowwise() += y_mean.transpose();
    }
    for (std::size_t i = 0; i < fold.test.size(); ++i) {
      const std::size_t row = fold.test[i];
      if (written[row]) fail(ErrorKind::kShapeMismatch, "sample predicted twice");
      written[row] = 1;
      run.predictions.row(static_cast<Eigen::Index>(row)) = pred.row(static_cast<Eigen::Index>(i));
    }

    RidgeModel model;
    if (keep_weights) model.weights = std::move(sol.weights);
    model.intercept = std::move(sol.intercept);
    model.lambda = config.lambda;
    model.standardization = {fold.feature_mean, fold.feature_std, std::move(y_mean),
                             std::move(y_std)};
    model.fold_id = f;
    run.models.push_back(std::move(model));
  }
  if (std::find(written.begin(), written.end(), 0) != written.end()) {
    fail(ErrorKind::kShapeMismatch, "fold plan left a sample without a prediction");
  }
  return run;
}

EncodingRun run_encoding(const PairedDataset& pair, const EncodingConfig& config) {
  const CrossValidatedDesign design(pair.features().values(), config);
  return run_encoding(design, pair);
}

}  // namespace neurotask::encoder
