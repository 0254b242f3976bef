#include "kcheck/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "kcheck/error.hpp"

namespace kcheck {

namespace {

// Squared distance between row i of A and row j of B, accumulated in column
// order so that d(a, b) and d(b, a) are bitwise identical.
inline double squared_distance(const Eigen::Ref<const Eigen::MatrixXd>& A, Eigen::Index i,
                               const Eigen::Ref<const Eigen::MatrixXd>& B, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index c = 0; c < A.cols(); ++c) {
    const double diff = A(i, c) - B(j, c);
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

KernelConfig KernelConfig::gaussian(double gamma) {
  KernelConfig cfg{KernelFamily::gaussian, gamma};
  cfg.validate();
  return cfg;
}

void KernelConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InputError("kernel gamma must be a positive finite number, got " + std::to_string(gamma));
  }
}

void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& M, const char* what) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (!std::isfinite(M(i, j))) {
        throw InputError(std::string(what) + " has a non-finite entry at (" + std::to_string(i) +
                         ", " + std::to_string(j) + ")");
      }
    }
  }
}

double kernel_eval(const KernelConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y) {
  cfg.validate();
  if (x.size() != y.size()) {
    throw InputError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  return std::exp(-cfg.gamma * (x - y).squaredNorm());
}

Eigen::MatrixXd kernel_matrix(const KernelConfig& cfg, const Eigen::Ref<const Eigen::MatrixXd>& X) {
  cfg.validate();
  require(X.rows() >= 1, "kernel_matrix: need at least one observation");
  require_finite(X, "covariate matrix");
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    K(j, j) = 1.0;
    for (Eigen::Index i = 0; i < j; ++i) {
      const double value = std::exp(-cfg.gamma * squared_distance(X, i, X, j));
      K(i, j) = value;
      K(j, i) = value;
    }
  }
  return K;
}

Eigen::MatrixXd kernel_cross(const KernelConfig& cfg, const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Eigen::Ref<const Eigen::MatrixXd>& V) {
  cfg.validate();
  if (V.rows() > 0 && X.cols() != V.cols()) {
    throw InputError("kernel_cross: covariates have " + std::to_string(X.cols()) +
                     " columns but locations have " + std::to_string(V.cols()));
  }
  require_finite(X, "covariate matrix");
  require_finite(V, "location matrix");
  Eigen::MatrixXd out(X.rows(), V.rows());
  for (Eigen::Index j = 0; j < V.rows(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out(i, j) = std::exp(-cfg.gamma * squared_distance(X, i, V, j));
    }
  }
  return out;
}

double median_heuristic(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  require(X.rows() >= 2, "median_heuristic: need at least two observations");
  require_finite(X, "covariate matrix");
  const Eigen::Index n = X.rows();
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) distances.push_back(std::sqrt(squared_distance(X, i, X, j)));
  }
  const auto mid = distances.begin() + static_cast<std::ptrdiff_t>((distances.size() - 1) / 2);
  std::nth_element(distances.begin(), mid, distances.end());
  if (!(*mid > 0.0)) {
    throw InputError("median_heuristic: median pairwise distance is zero, bandwidth undefined");
  }
  return 1.0 / *mid;
}

}  // namespace kcheck
