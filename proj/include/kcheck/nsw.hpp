#pragma once

#include <Eigen/Dense>

#include "kcheck/analysis.hpp"
#include "kcheck/dataset.hpp"
#include "kcheck/models.hpp"

namespace kcheck {

/// Default column roles for the Dehejia-Wahba NSW extract: outcome re78,
/// treatment treat, every other column offered as a covariate.
CsvSchema nsw_schema();

/// Eight covariates in fixed order: age/10, educ/10, black, hisp, married,
/// nodegree, log1p(re74), log1p(re75). The outcome becomes log1p(re78).
/// Accepts the aliases education, hispanic and nodegr. Negative earnings or
/// non-binary indicators are input errors.
Dataset preprocess_nsw(const Dataset& raw);

struct NswResult {
  FittedModel probit;
  /// Propensity residual T - Phi(x'beta).
  TestSuiteResult individual;
  /// Two-component residual (propensity, zero-CATE); tuned separately.
  TestSuiteResult joint;
};

/// Both NSW tests with the same options: same folds, locations and
/// multipliers, with (gamma, lambda) cross-validated per residual system.
NswResult run_nsw_tests(const Dataset& ds, const TestOptions& options);

}  // namespace kcheck
