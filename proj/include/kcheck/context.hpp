#pragma once

#include <optional>

#include <Eigen/Dense>

#include "kcheck/kernels.hpp"
#include "kcheck/spectral.hpp"

namespace kcheck {

/// Everything the statistics need about the kernel side of one test
/// invocation: the covariates, the kernel, lambda, K and (for lambda > 0) the
/// factorization of K + n*lambda*I. Immutable once built and safe to share
/// across bootstrap workers.
class KernelContext {
 public:
  /// Regularized context; requires lambda > 0.
  static KernelContext build(const Eigen::Ref<const Eigen::MatrixXd>& X, const KernelConfig& cfg,
                             double lambda);
  /// Context without a ridge, for the KCM/ICM/GP quadratic forms.
  static KernelContext unregularized(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                     const KernelConfig& cfg);

  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::MatrixXd& K() const { return K_; }
  const KernelConfig& kernel() const { return cfg_; }
  double lambda() const { return lambda_; }
  Eigen::Index n() const { return K_.rows(); }
  bool regularized() const { return factor_.has_value(); }

  /// The factorization of K + n*lambda*I; throws if the context is unregularized.
  const RegularizedFactorization& factor() const;

  /// kernel_cross(X, V) for this context's covariates and kernel.
  Eigen::MatrixXd cross(const Eigen::Ref<const Eigen::MatrixXd>& V) const;

 private:
  KernelContext(Eigen::MatrixXd X, KernelConfig cfg, double lambda, Eigen::MatrixXd K,
                std::optional<RegularizedFactorization> factor);

  Eigen::MatrixXd X_;
  KernelConfig cfg_;
  double lambda_;
  Eigen::MatrixXd K_;
  std::optional<RegularizedFactorization> factor_;
};

}  // namespace kcheck
