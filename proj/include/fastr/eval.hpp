#pragma once

// Metrics, k-fold cross-validation over (lambda, epsilon) grids, and the
// seeded train/test split used by the classification protocol.

#include "fastr/estimator.hpp"
#include "fastr/tensor.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace fastr {

double mse(const Vector<double>& y_hat, const Vector<double>& y);

/// ||W_hat - W_star||_F / ||W_star||_F. Throws ZeroNormError for W_star == 0.
double coefficient_error(const Tensor& w_hat, const Tensor& w_star);

/// Mann-Whitney AUC; labels are 1 (positive) and anything else (negative)
/// after `is_positive`. Ties count one half.
double auc(const Vector<double>& scores, const std::vector<bool>& positive);

/// True when every value is in {0, 1} or every value is in {-1, +1}.
bool is_binary(const Vector<double>& labels);

/// Maps binary labels to positive flags (1 or +1 is positive).
std::vector<bool> positive_flags(const Vector<double>& labels);

/// Maps binary labels to the +1/-1 regression coding.
Vector<double> signed_coding(const Vector<double>& labels);

struct CVGrid {
  std::vector<double> lambdas;
  std::vector<double> epsilons;
  int k = 5;

  void validate(Index n_samples) const;

  /// lambda in 1e-4..1e1 (7 points), epsilon in 1e-3..1e2 (6 points).
  static CVGrid defaults();
};

struct CVResult {
  double best_lambda = 0.0;
  double best_epsilon = 0.0;
  double best_score = 0.0;
  /// Mean validation MSE, lambdas along rows and epsilons along columns.
  Eigen::MatrixXd cell_scores;
  /// fold_scores[cell][fold], cell = lambda_index * n_eps + eps_index. NaN
  /// marks a fold whose fit failed.
  std::vector<std::vector<double>> fold_scores;
  std::vector<int> fold_assignment;
};

/// Seeded shuffle, then contiguous blocks; the first N mod k folds get one
/// extra sample.
std::vector<int> assign_folds(Index n, int k, std::uint64_t seed);

/// Evaluates every grid cell by k-fold validation MSE with `base` supplying
/// everything but lambda and epsilon. `base.threads` parallelizes over
/// (cell, fold) jobs; scores do not depend on it.
CVResult kfold_cv(const Data& data, const CVGrid& grid, const FitConfig& base);

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Seeded shuffle, then the first round(fraction * N) indices train.
Split split_indices(Index n, double train_fraction, std::uint64_t seed);

std::pair<Data, Data> train_test_split(const Data& data, double train_fraction,
                                       std::uint64_t seed);

struct ClassificationResult {
  CVResult cv;
  FitReport<double> model;
  double test_auc = 0.0;
  Index n_train = 0;
  Index n_test = 0;
};

/// Binary classification run: split, code labels as +1/-1, select (lambda,
/// epsilon) by CV on the training part, refit, and score AUC on the test part.
ClassificationResult evaluate_classification(const Data& labelled, const CVGrid& grid,
                                             const FitConfig& base, double train_fraction,
                                             std::uint64_t split_seed);

}  // namespace fastr
