#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "kcheck/bootstrap.hpp"
#include "kcheck/models.hpp"
#include "kcheck/stats.hpp"
#include "kcheck/tuning.hpp"

namespace kcheck {

/// Settings for one test invocation on a fitted model.
struct TestOptions {
  std::vector<StatName> statistics{StatName::proj1, StatName::proj2, StatName::rand1,
                                   StatName::rand2};
  Eigen::Index B = 199;
  Eigen::Index J = 3;
  std::uint64_t seed = 0;
  /// Fixed KRR hyperparameters; when either is unset it is chosen by CV
  /// (with the other held at its fixed value if given).
  std::optional<double> gamma;
  std::optional<double> lambda;
  /// Kernel parameter for the gp benchmark; unset means the median heuristic.
  std::optional<double> gp_gamma;
  CvRule cv_rule = CvRule::one_se;
  double location_ridge = 1e-8;
  MultiplierFamily family = MultiplierFamily::mammen;
  unsigned workers = 1;
  bool keep_bootstrap_values = false;
  /// Rescale residual k by 1/sqrt(1 - h_kk) before perturbing.
  bool leverage_adjust = false;
};

struct TuningRecord {
  bool cross_validated = false;
  double gamma = 0.0;
  double lambda = 0.0;
  double cv_score = 0.0;
  int folds = 0;
  /// Rows used to choose the parameters (the train/validation phase) and the
  /// rows the chosen parameters are then applied to (the full sample).
  Eigen::Index tuning_rows = 0;
  Eigen::Index applied_rows = 0;
  std::optional<TuneResult> cv;
};

struct TestSuiteResult {
  TuningRecord tuning;
  std::optional<LocationSet> locations;
  double gp_gamma = 0.0;
  std::vector<TestReport> reports;

  const TestReport& report(StatName name) const;
};

/// Tunes (gamma, lambda) on the raw residuals, builds the kernel context,
/// draws J locations from a normal fitted to X, and bootstraps every
/// requested statistic on the orthogonalized residuals. Random streams:
/// folds, locations and bootstrap multipliers come from disjoint substreams
/// of `seed`.
TestSuiteResult run_tests(const Eigen::Ref<const Eigen::MatrixXd>& X, const FittedModel& fm,
                          const TestOptions& options);

}  // namespace kcheck
