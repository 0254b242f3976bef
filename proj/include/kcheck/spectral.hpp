#pragma once

#include <Eigen/Dense>

namespace kcheck {

/// Eigenpairs of a symmetric PSD matrix: eigenvalues descending, eigenvectors
/// as orthonormal columns in matching order. Negative eigenvalues within
/// 1e-10 * max are clamped to zero.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

EigenSystem eigendecompose(const Eigen::Ref<const Eigen::MatrixXd>& K);

/// Cholesky factorization of K + ridge * I, built once and reused for every
/// right-hand side (location columns, bootstrap replicates).
class RegularizedFactorization {
 public:
  RegularizedFactorization(const Eigen::Ref<const Eigen::MatrixXd>& K, double ridge);

  /// (K + ridge I)^{-1} b, column by column.
  Eigen::MatrixXd solve(const Eigen::Ref<const Eigen::MatrixXd>& b) const;

  double ridge() const { return ridge_; }
  Eigen::Index size() const { return llt_.rows(); }

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double ridge_;
};

inline Eigen::MatrixXd reg_solve(const RegularizedFactorization& f,
                                 const Eigen::Ref<const Eigen::MatrixXd>& b) {
  return f.solve(b);
}

enum class SpectralWeight { proj1, proj2, kcm };

/// Evaluates a statistic through the eigenbasis of K. With s_i = sigma_i^2 / n
/// and c_i = eps' u_i the weights on c_i^2 are s/(s+lambda)^2, s/(s+lambda) and
/// s, which reproduce the direct quadratic forms
///   n eps'(K+n lambda I)^{-1} K (K+n lambda I)^{-1} eps,
///   eps'(K+n lambda I)^{-1} K eps,
///   (1/n) eps' K eps.
/// Columns of eps are summed.
double spectral_statistic(const EigenSystem& eig, const Eigen::Ref<const Eigen::MatrixXd>& eps,
                          double lambda, SpectralWeight weight);

/// Largest `count` eigenvalues of a symmetric PSD matrix by subspace iteration
/// with Rayleigh-Ritz extraction. Much cheaper than eigendecompose when only
/// the head of the spectrum is needed.
Eigen::VectorXd leading_eigenvalues(const Eigen::Ref<const Eigen::MatrixXd>& K, Eigen::Index count);

/// Leading eigenvalues of the integral operator
///   (L f)(x) = \int exp(-gamma (x - y)^2) f(y) dP(y),  P = N(0, sigma_x^2),
/// in closed form (Zhu, Williams, Rohwer & Morciniec 1998; Rasmussen & Williams,
/// "Gaussian Processes for Machine Learning", 2006, sec. 4.3.1):
///   a = 1 / (4 sigma_x^2),  b = gamma,  c = sqrt(a^2 + 2ab),
///   A = a + b + c,  B = b / A,  mu_k = sqrt(2a / A) * B^k,  k = 0, 1, ...
/// The eigenvalues sum to E k(X, X) = 1.
Eigen::VectorXd gaussian_measure_spectrum(double gamma, double sigma_x, Eigen::Index count);

}  // namespace kcheck
