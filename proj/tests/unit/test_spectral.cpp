#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "kcheck/context.hpp"
#include "kcheck/error.hpp"
#include "kcheck/kernels.hpp"
#include "kcheck/spectral.hpp"
#include "kcheck/stats.hpp"
#include "quadrature.hpp"

using namespace kcheck;
using kcheck::testing::Gen;
using kcheck::testing::rel_diff;

TEST_CASE("eigendecompose small cases") {
  const EigenSystem id = eigendecompose(Eigen::MatrixXd::Identity(3, 3));
  CHECK((id.eigenvalues - Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((id.eigenvectors.transpose() * id.eigenvectors - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <=
        1e-14);

  Eigen::Matrix2d D;
  D << 2, 0, 0, 1;
  const EigenSystem e = eigendecompose(D);
  CHECK(e.eigenvalues(0) == doctest::Approx(2.0));
  CHECK(e.eigenvalues(1) == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.eigenvectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eigendecompose reconstructs random PSD matrices") {
  Gen g(11);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = g.index(2, 50);
    const Eigen::MatrixXd A = g.matrix(n, g.index(1, n));
    const Eigen::MatrixXd K = A * A.transpose();
    const EigenSystem e = eigendecompose(K);
    const Eigen::MatrixXd& U = e.eigenvectors;
    CHECK((U * e.eigenvalues.asDiagonal() * U.transpose() - K).norm() <= 1e-10 * K.norm());
    CHECK((U.transpose() * U - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(e.eigenvalues.minCoeff() >= 0.0);
    for (Eigen::Index i = 1; i < n; ++i) CHECK(e.eigenvalues(i) <= e.eigenvalues(i - 1));
  }
}

TEST_CASE("reg_solve") {
  const RegularizedFactorization zero(Eigen::MatrixXd::Zero(2, 2), 2.0);
  const Eigen::MatrixXd x = reg_solve(zero, Eigen::Vector2d(4, 6));
  CHECK(x(0, 0) == doctest::Approx(2.0));
  CHECK(x(1, 0) == doctest::Approx(3.0));
  const RegularizedFactorization id(Eigen::MatrixXd::Identity(2, 2), 3.0);
  const Eigen::MatrixXd y = reg_solve(id, Eigen::Vector2d(8, 8));
  CHECK(y(0, 0) == doctest::Approx(2.0));
  CHECK(y(1, 0) == doctest::Approx(2.0));
  CHECK_THROWS(RegularizedFactorization(Eigen::MatrixXd::Identity(2, 2), 0.0));

  Gen g(12);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = g.index(2, 60);
    const Eigen::MatrixXd K = kernel_matrix(KernelConfig::gaussian(g.scale(0.05, 3.0)), g.matrix(n, 3));
    const double ridge = n * g.scale(1e-4, 1.0);
    const RegularizedFactorization f(K, ridge);
    const Eigen::MatrixXd b = g.matrix(n, 3);
    const Eigen::MatrixXd sol = reg_solve(f, b);
    const Eigen::MatrixXd M = K + ridge * Eigen::MatrixXd::Identity(n, n);
    CHECK((M * sol - b).norm() <= 1e-9 * b.norm());
  }
}

TEST_CASE("spectral_statistic closed cases") {
  const EigenSystem id = eigendecompose(Eigen::MatrixXd::Identity(3, 3));
  const Eigen::Vector3d ones = Eigen::Vector3d::Ones();
  CHECK(spectral_statistic(id, ones, 1.0, SpectralWeight::proj2) == doctest::Approx(0.75));
  CHECK(spectral_statistic(id, ones, 1.0, SpectralWeight::proj1) == doctest::Approx(0.5625));
  CHECK(spectral_statistic(id, ones, 1.0, SpectralWeight::kcm) == doctest::Approx(1.0));
  for (auto w : {SpectralWeight::proj1, SpectralWeight::proj2, SpectralWeight::kcm})
    CHECK(spectral_statistic(id, Eigen::Vector3d::Zero(), 1.0, w) == 0.0);
  CHECK_THROWS_AS(spectral_statistic(id, Eigen::Vector2d::Ones(), 1.0, SpectralWeight::kcm), InputError);
}

TEST_CASE("spectral statistics equal the direct quadratic forms") {
  Gen g(13);
  const double lambdas[] = {1e-3, 1e-1, 1.0};
  for (int t = 0; t < 50; ++t) {
    const Eigen::Index n = g.index(5, 60);
    const Eigen::MatrixXd X = g.matrix(n, g.index(1, 5));
    const double lambda = lambdas[t % 3];
    const auto ctx = KernelContext::build(X, KernelConfig::gaussian(g.scale(0.05, 2.0)), lambda);
    const Eigen::MatrixXd eps = g.matrix(n, g.index(1, 2));
    const EigenSystem e = eigendecompose(ctx.K());
    CHECK(rel_diff(spectral_statistic(e, eps, lambda, SpectralWeight::proj1), stat_proj1(eps, ctx).value) <= 1e-8);
    CHECK(rel_diff(spectral_statistic(e, eps, lambda, SpectralWeight::proj2), stat_proj2(eps, ctx).value) <= 1e-8);
    CHECK(rel_diff(spectral_statistic(e, eps, lambda, SpectralWeight::kcm), stat_kcm(eps, ctx).value) <= 1e-8);
  }
}

TEST_CASE("leading_eigenvalues agrees with the full decomposition") {
  Gen g(14);
  for (int t = 0; t < 10; ++t) {
    const Eigen::Index n = g.index(20, 120);
    const Eigen::MatrixXd K = kernel_matrix(KernelConfig::gaussian(0.5), g.matrix(n, 1));
    const Eigen::VectorXd head = leading_eigenvalues(K, 5);
    const EigenSystem full = eigendecompose(K);
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(rel_diff(head(i), full.eigenvalues(i)) <= 1e-8);
  }
}

TEST_CASE("gaussian measure spectrum") {
  CHECK(gaussian_measure_spectrum(0.5, 1.0, 0).size() == 0);
  const Eigen::VectorXd mu = gaussian_measure_spectrum(0.5, 1.0, 30);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    CHECK(mu(i) > 0.0);
    if (i > 0) CHECK(mu(i) < mu(i - 1));
  }
  CHECK(gaussian_measure_spectrum(0.5, 1.0, 400).sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gaussian_measure_spectrum(0.0, 1.0, 3), InputError);
  CHECK_THROWS_AS(gaussian_measure_spectrum(1.0, -1.0, 3), InputError);
}

TEST_CASE("gaussian measure spectrum matches a 2000-point Gauss-Hermite discretisation") {
  const auto q = kcheck::testing::gauss_hermite_normal(2000, 1.0);
  CHECK(q.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.weights.dot(q.nodes.cwiseAbs2()) == doctest::Approx(1.0).epsilon(1e-12));
  for (double gamma : {0.25, 0.5, 2.0}) {
    const Eigen::VectorXd quad = kcheck::testing::quadrature_operator_spectrum(q, gamma, 5);
    const Eigen::VectorXd closed = gaussian_measure_spectrum(gamma, 1.0, 5);
    CHECK(rel_diff(quad(0), closed(0)) <= 1e-4);
    for (Eigen::Index i = 1; i < 5; ++i) CHECK(rel_diff(quad(i), closed(i)) <= 1e-6);
  }
  const auto wide = kcheck::testing::gauss_hermite_normal(2000, 2.5);
  CHECK(rel_diff(kcheck::testing::quadrature_operator_spectrum(wide, 0.3, 1)(0),
                 gaussian_measure_spectrum(0.3, 2.5, 1)(0)) <= 1e-4);
}
