#include "kcheck/context.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "kcheck/error.hpp"

namespace kcheck {

KernelContext::KernelContext(Eigen::MatrixXd X, KernelConfig cfg, double lambda, Eigen::MatrixXd K,
                             std::optional<RegularizedFactorization> factor)
    : X_(std::move(X)), cfg_(cfg), lambda_(lambda), K_(std::move(K)), factor_(std::move(factor)) {}

KernelContext KernelContext::build(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                   const KernelConfig& cfg, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("lambda must be positive and finite, got " + std::to_string(lambda));
  }
  Eigen::MatrixXd K = kernel_matrix(cfg, X);
  RegularizedFactorization factor(K, static_cast<double>(X.rows()) * lambda);
  return KernelContext(X, cfg, lambda, std::move(K), std::move(factor));
}

KernelContext KernelContext::unregularized(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                           const KernelConfig& cfg) {
  Eigen::MatrixXd K = kernel_matrix(cfg, X);
  return KernelContext(X, cfg, 0.0, std::move(K), std::nullopt);
}

const RegularizedFactorization& KernelContext::factor() const {
  if (!factor_) throw InputError("kernel context has no regularized factorization (lambda = 0)");
  return *factor_;
}

Eigen::MatrixXd KernelContext::cross(const Eigen::Ref<const Eigen::MatrixXd>& V) const {
  return kernel_cross(cfg_, X_, V);
}

}  // namespace kcheck
