#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

namespace kcheck {

/// How the winning cell is picked from the CV table. `min` takes the lowest
/// pooled error. `one_se` takes the most regularized cell (largest lambda,
/// then smallest gamma) whose error is within one standard error of the
/// minimum, the standard error being that of the per-fold mean squared errors
/// of the minimizing cell.
enum class CvRule { min, one_se };

struct TuneGrid {
  std::vector<double> gamma_grid;
  std::vector<double> lambda_grid;
  int folds = 5;
  std::uint64_t seed = 0;
  CvRule rule = CvRule::one_se;

  void validate() const;
};

struct CvCell {
  double gamma = 0.0;
  double lambda = 0.0;
  int fold = 0;
  double sse = 0.0;
  Eigen::Index n_holdout = 0;
};

struct TuneResult {
  double gamma = 0.0;
  double lambda = 0.0;
  /// Pooled held-out mean squared error of the chosen cell.
  double cv_score = 0.0;
  /// Every (gamma, lambda, fold) cell, in grid order.
  std::vector<CvCell> cv_table;
};

/// gamma: median_heuristic(X) * {1/8, ..., 8}; lambda: {1e-4, ..., 1}; 5 folds.
TuneGrid default_grid(const Eigen::Ref<const Eigen::MatrixXd>& X, std::uint64_t seed = 0);

/// Balanced fold labels in [0, folds): a seeded shuffle of 0..n-1 with
/// position i assigned to fold i % folds.
std::vector<int> fold_assignment(Eigen::Index n, int folds, std::uint64_t seed);

/// K-fold cross-validation of kernel ridge regression of eps on X.
///
/// For each (gamma, lambda) and fold the coefficients
/// (K_tt + n_t lambda I)^{-1} eps_t are fit on the training part and the
/// held-out residuals are predicted through the cross kernel. The score is the
/// held-out squared error summed over folds and residual columns, divided by n.
/// The minimum wins; ties go to the larger lambda, then the smaller gamma.
TuneResult tune(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::MatrixXd>& eps,
                const TuneGrid& grid);

/// Same, with an explicit fold labelling (used to check order invariance).
TuneResult tune_with_folds(const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const Eigen::MatrixXd>& eps, const TuneGrid& grid,
                           const std::vector<int>& folds);

/// CSV with columns gamma,lambda,fold,sse,n_holdout.
void write_cv_table_csv(const TuneResult& result, const std::filesystem::path& path);

}  // namespace kcheck
