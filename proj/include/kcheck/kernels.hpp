#pragma once

#include <Eigen/Dense>

namespace kcheck {

/// Kernel families. Only the Gaussian kernel is implemented; new families
/// slot in here and in kernel_eval's dispatch.
enum class KernelFamily { gaussian };

/// k(x, y) = exp(-gamma * ||x - y||^2) for the Gaussian family.
struct KernelConfig {
  KernelFamily family = KernelFamily::gaussian;
  double gamma = 1.0;

  static KernelConfig gaussian(double gamma);
  void validate() const;
};

double kernel_eval(const KernelConfig& cfg, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& y);

/// Dense n x n kernel matrix over the rows of X. Symmetric with an exact unit
/// diagonal; the upper triangle is computed and mirrored.
Eigen::MatrixXd kernel_matrix(const KernelConfig& cfg, const Eigen::Ref<const Eigen::MatrixXd>& X);

/// n x J matrix whose column j is (k(x_1, v_j), ..., k(x_n, v_j)).
Eigen::MatrixXd kernel_cross(const KernelConfig& cfg, const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Eigen::Ref<const Eigen::MatrixXd>& V);

/// 1 / median of the pairwise Euclidean distances ||x_i - x_j||, i < j.
/// For an even number of pairs the lower-middle order statistic is used.
double median_heuristic(const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Throws InputError if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Eigen::MatrixXd>& M, const char* what);

}  // namespace kcheck
