#include "kcheck/spectral.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "kcheck/error.hpp"
#include "kcheck/rng.hpp"

namespace kcheck {

EigenSystem eigendecompose(const Eigen::Ref<const Eigen::MatrixXd>& K) {
  require(K.rows() == K.cols(), "eigendecompose: matrix must be square");
  const Eigen::MatrixXd sym = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigendecompose: eigensolver did not converge (n=" << K.rows()
        << ", max |entry|=" << sym.cwiseAbs().maxCoeff() << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::Index n = sym.rows();
  EigenSystem out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  const double top = n > 0 ? std::max(out.eigenvalues(0), 0.0) : 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double& v = out.eigenvalues(i);
    if (v < 0.0 && v > -1e-10 * top) v = 0.0;
  }
  return out;
}

RegularizedFactorization::RegularizedFactorization(const Eigen::Ref<const Eigen::MatrixXd>& K,
                                                   double ridge)
    : ridge_(ridge) {
  require(K.rows() == K.cols(), "regularized factorization: matrix must be square");
  if (!(ridge > 0.0)) {
    throw NumericalError("regularized factorization: ridge n*lambda must be positive, got " +
                         std::to_string(ridge));
  }
  Eigen::MatrixXd shifted = K;
  shifted.diagonal().array() += ridge;
  llt_.compute(shifted);
  if (llt_.info() != Eigen::Success) {
    throw NumericalError("regularized factorization: K + n*lambda*I is not positive definite");
  }
}

Eigen::MatrixXd RegularizedFactorization::solve(const Eigen::Ref<const Eigen::MatrixXd>& b) const {
  if (b.rows() != size()) {
    throw InputError("reg_solve: right-hand side has " + std::to_string(b.rows()) +
                     " rows, factorization has " + std::to_string(size()));
  }
  return llt_.solve(b);
}

double spectral_statistic(const EigenSystem& eig, const Eigen::Ref<const Eigen::MatrixXd>& eps,
                          double lambda, SpectralWeight weight) {
  const Eigen::Index n = eig.eigenvalues.size();
  if (eps.rows() != n) {
    throw InputError("spectral_statistic: residual length " + std::to_string(eps.rows()) +
                     " does not match eigensystem size " + std::to_string(n));
  }
  const Eigen::MatrixXd coeffs = eig.eigenvectors.transpose() * eps;  // n x q
  const double dn = static_cast<double>(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = eig.eigenvalues(i) / dn;
    double w = 0.0;
    switch (weight) {
      case SpectralWeight::proj1: w = s / ((s + lambda) * (s + lambda)); break;
      case SpectralWeight::proj2: w = s / (s + lambda); break;
      case SpectralWeight::kcm: w = s; break;
    }
    total += w * coeffs.row(i).squaredNorm();
  }
  return total;
}

Eigen::VectorXd leading_eigenvalues(const Eigen::Ref<const Eigen::MatrixXd>& K, Eigen::Index count) {
  require(K.rows() == K.cols(), "leading_eigenvalues: matrix must be square");
  const Eigen::Index n = K.rows();
  require(count >= 0 && count <= n, "leading_eigenvalues: count out of range");
  if (count == 0) return Eigen::VectorXd(0);
  const Eigen::Index block = std::min<Eigen::Index>(n, count + 8);
  if (block == n) {
    return eigendecompose(K).eigenvalues.head(count);
  }

  Rng rng(0x5eed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd Q(n, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < n; ++i) Q(i, j) = normal(rng);
  Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Q).householderQ() * Eigen::MatrixXd::Identity(n, block);

  Eigen::VectorXd previous = Eigen::VectorXd::Constant(count, -1.0);
  for (int iter = 0; iter < 1000; ++iter) {
    const Eigen::MatrixXd Z = K * Q;
    const Eigen::MatrixXd H = Q.transpose() * Z;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(0.5 * (H + H.transpose()));
    const Eigen::VectorXd values = ritz.eigenvalues().reverse().head(count);
    if (((values - previous).array().abs() <= 1e-14 * values.cwiseAbs().maxCoeff()).all()) {
      return values;
    }
    previous = values;
    Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Z).householderQ() *
        Eigen::MatrixXd::Identity(n, block);
  }
  throw NumericalError("leading_eigenvalues: subspace iteration did not converge");
}

Eigen::VectorXd gaussian_measure_spectrum(double gamma, double sigma_x, Eigen::Index count) {
  require(gamma > 0.0 && std::isfinite(gamma), "gaussian_measure_spectrum: gamma must be positive");
  require(sigma_x > 0.0 && std::isfinite(sigma_x),
          "gaussian_measure_spectrum: sigma_x must be positive");
  require(count >= 0, "gaussian_measure_spectrum: count must be nonnegative");
  const double a = 1.0 / (4.0 * sigma_x * sigma_x);
  const double b = gamma;
  const double c = std::sqrt(a * a + 2.0 * a * b);
  const double A = a + b + c;
  const double B = b / A;
  const double scale = std::sqrt(2.0 * a / A);
  Eigen::VectorXd mu(count);
  for (Eigen::Index k = 0; k < count; ++k) mu(k) = scale * std::pow(B, static_cast<double>(k));
  return mu;
}

}  // namespace kcheck
