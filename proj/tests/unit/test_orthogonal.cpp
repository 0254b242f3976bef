#include <doctest.h>

#include "generators.hpp"
#include "kcheck/context.hpp"
#include "kcheck/error.hpp"
#include "kcheck/models.hpp"
#include "kcheck/orthogonal.hpp"
#include "kcheck/stats.hpp"

using namespace kcheck;
using kcheck::testing::Gen;
using kcheck::testing::rel_diff;

TEST_CASE("projector closed cases") {
  const Projector center(Eigen::MatrixXd::Ones(3, 1));
  const Eigen::VectorXd c = center.apply(Eigen::Vector3d(1, 2, 3));
  CHECK(c(0) == doctest::Approx(-1.0));
  CHECK(std::abs(c(1)) <= 1e-15);
  CHECK(c(2) == doctest::Approx(1.0));

  const Projector first(Eigen::Vector2d(1, 0));
  const Eigen::VectorXd v = first.apply(Eigen::Vector2d(3.5, -2.0));
  CHECK(v(0) == 0.0);
  CHECK(v(1) == -2.0);

  CHECK_THROWS_AS(build_projector(Eigen::MatrixXd::Ones(2, 2)), InputError);
  CHECK_THROWS_AS(build_projector(Eigen::MatrixXd::Ones(2, 3)), InputError);
}

TEST_CASE("projector matches the explicit formula") {
  Gen g(31);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = g.index(5, 60);
    const Eigen::MatrixXd G = g.matrix(n, g.index(1, 4));
    const Eigen::VectorXd v = g.vector(n);
    const Eigen::VectorXd oracle = v - G * (G.transpose() * G).ldlt().solve(G.transpose() * v);
    CHECK((build_projector(G).apply(v) - oracle).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, v.norm()));
  }
}

TEST_CASE("projector diagonal is one minus the leverage") {
  Gen g(32);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = g.index(5, 50);
    const Eigen::MatrixXd G = g.matrix(n, g.index(1, 4));
    const Eigen::MatrixXd H = G * (G.transpose() * G).ldlt().solve(G.transpose());
    const Eigen::VectorXd oracle = (1.0 - H.diagonal().array()).matrix();
    const Eigen::VectorXd diag = build_projector(G).diagonal();
    CHECK((diag - oracle).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(diag.sum() == doctest::Approx(static_cast<double>(n - G.cols())).epsilon(1e-10));
  }
  CHECK(build_projector(Eigen::MatrixXd::Zero(4, 1)).diagonal() == Eigen::VectorXd::Ones(4));
}

TEST_CASE("projector is idempotent, annihilating and symmetric") {
  Gen g(32);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = g.index(3, 80);
    const Eigen::Index p = g.index(1, std::min<Eigen::Index>(n - 1, 8));
    Eigen::MatrixXd G = g.matrix(n, p) * g.scale(1e-3, 1e3);
    if (p >= 2 && t % 4 == 0) G.col(p - 1) = G.col(0) - 0.5 * G.col(p - 2);  // rank deficient
    const Projector P(G);
    const Eigen::VectorXd u = g.vector(n), v = g.vector(n);
    const Eigen::VectorXd pv = P.apply(v);
    CHECK((P.apply(pv) - pv).norm() <= 1e-9 * std::max(1e-300, pv.norm()));
    CHECK((G.transpose() * pv).cwiseAbs().maxCoeff() <= 1e-8 * v.norm() * G.norm());
    CHECK(rel_diff(P.apply(u).dot(v), u.dot(pv)) <= 1e-9);
    if (p >= 2 && t % 4 == 0) CHECK(P.rank() == p - 1);
  }
}

TEST_CASE("orthogonalize_residuals") {
  Gen g(33);
  const Eigen::MatrixXd X = g.matrix(50, 3);
  const Eigen::VectorXd Y = g.vector(50);
  const FittedModel ols = fit_ols(X, Y);
  CHECK((orthogonalize_residuals(ols) - ols.residuals).cwiseAbs().maxCoeff() <= 1e-9);

  Eigen::VectorXd T(50);
  for (Eigen::Index i = 0; i < 50; ++i) T(i) = (X(i, 0) + g.normal() > 0) ? 1.0 : 0.0;
  const FittedModel joint = joint_cate_residuals(X, Eigen::VectorXd::Zero(50), T, fit_probit(X, T));
  const Eigen::MatrixXd perp = orthogonalize_residuals(joint);
  REQUIRE(perp.cols() == 2);
  CHECK(perp.col(1).cwiseAbs().maxCoeff() == 0.0);
  for (int r = 0; r < 2; ++r)
    CHECK((joint.scores[r].transpose() * perp.col(r)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("linear model: projected residuals do not depend on theta_hat") {
  Gen g(34);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = g.index(30, 120);
    const Eigen::MatrixXd X = g.matrix(n, g.index(1, 5));
    const Eigen::VectorXd theta0 = g.vector(X.cols() + 1);
    const Eigen::VectorXd e0 = g.vector(n);
    const Eigen::VectorXd Y = with_intercept(X) * theta0 + e0;
    const FittedModel fm = fit_ols(X, Y);
    const Projector P(fm.scores[0]);
    const Eigen::VectorXd a = P.apply(fm.residuals.col(0));
    const Eigen::VectorXd b = P.apply(e0);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, b.norm()));

    const auto ctx = KernelContext::build(X, KernelConfig::gaussian(g.scale(0.05, 1.0)), g.scale(1e-3, 1.0));
    const Eigen::MatrixXd kV = ctx.cross(g.matrix(3, X.cols()));
    for (StatName s : {StatName::proj1, StatName::proj2, StatName::rand1, StatName::rand2, StatName::kcm})
      CHECK(rel_diff(compute_statistic(s, a, ctx, &kV).value, compute_statistic(s, b, ctx, &kV).value) <= 1e-8);
  }
}
