#include "kcheck/models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "kcheck/error.hpp"
#include "kcheck/kernels.hpp"

namespace kcheck {

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::ols: return "ols";
    case ModelTag::probit: return "probit";
    case ModelTag::probit_cate_joint: return "probit_cate_joint";
  }
  return "unknown";
}

void FittedModel::validate() const {
  require(residuals.cols() >= 1, "fitted model has no residual columns");
  require(static_cast<Eigen::Index>(scores.size()) == residuals.cols(),
          "fitted model needs one score matrix per residual column");
  for (const auto& G : scores) {
    require(G.rows() == residuals.rows(), "score matrix row count differs from residual rows");
  }
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

Eigen::MatrixXd with_intercept(const Eigen::Ref<const Eigen::MatrixXd>& X) {
  Eigen::MatrixXd out(X.rows(), X.cols() + 1);
  out.col(0).setOnes();
  out.rightCols(X.cols()) = X;
  return out;
}

// ---------------------------------------------------------------- OLS

Eigen::VectorXd ols_residual(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Eigen::Ref<const Eigen::VectorXd>& Y,
                             const Eigen::Ref<const Eigen::VectorXd>& theta) {
  return Y - with_intercept(X) * theta;
}

FittedModel fit_ols(const Eigen::Ref<const Eigen::MatrixXd>& X,
                    const Eigen::Ref<const Eigen::VectorXd>& Y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols() + 1;
  require(Y.size() == n, "fit_ols: outcome length differs from covariate rows");
  require(n > p, "fit_ols: need more observations than parameters (n=" + std::to_string(n) +
                     ", p=" + std::to_string(p) + ")");
  require_finite(X, "covariate matrix");
  require_finite(Y, "outcome vector");

  const Eigen::MatrixXd Xa = with_intercept(X);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xa);
  if (qr.rank() < p) {
    std::ostringstream msg;
    msg << "fit_ols: regressor matrix is rank deficient (rank " << qr.rank() << " < " << p
        << "); dependent columns:";
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < p; ++k) {
      const int col = perm(k);
      if (col == 0) msg << " intercept";
      else msg << " x" << col;
    }
    throw InputError(msg.str());
  }

  FittedModel fm;
  fm.tag = ModelTag::ols;
  fm.theta_hat = qr.solve(Y);
  fm.residuals = Y - Xa * fm.theta_hat;
  fm.scores.push_back(-Xa);
  return fm;
}

// ---------------------------------------------------------------- probit

namespace {

// d/dz of the per-observation probit log-likelihood.
inline double probit_weight(double t, double z) {
  if (t > 0.5) {
    const double cdf = normal_cdf(z);
    return cdf > 0.0 ? normal_pdf(z) / cdf : -z;
  }
  const double upper = normal_cdf(-z);
  return upper > 0.0 ? -normal_pdf(z) / upper : -z;
}

double probit_loglik(const Eigen::MatrixXd& Xa, const Eigen::VectorXd& T,
                     const Eigen::VectorXd& beta) {
  const Eigen::VectorXd z = Xa * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double p = T(i) > 0.5 ? normal_cdf(z(i)) : normal_cdf(-z(i));
    ll += std::log(p);
  }
  return ll;
}

Eigen::VectorXd probit_gradient_aug(const Eigen::MatrixXd& Xa, const Eigen::VectorXd& T,
                                    const Eigen::VectorXd& beta) {
  const Eigen::VectorXd z = Xa * beta;
  Eigen::VectorXd w(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) w(i) = probit_weight(T(i), z(i));
  return Xa.transpose() * w;
}

void validate_binary(const Eigen::Ref<const Eigen::VectorXd>& T) {
  Eigen::Index ones = 0;
  for (Eigen::Index i = 0; i < T.size(); ++i) {
    if (T(i) != 0.0 && T(i) != 1.0) {
      throw InputError("treatment must be 0/1; row " + std::to_string(i + 1) + " has " +
                       std::to_string(T(i)));
    }
    ones += T(i) == 1.0;
  }
  if (ones == 0 || ones == T.size()) {
    throw InputError("treatment has a single class; probit is not identified");
  }
}

}  // namespace

Eigen::VectorXd probit_gradient(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const Eigen::Ref<const Eigen::VectorXd>& T,
                                const Eigen::Ref<const Eigen::VectorXd>& beta) {
  return probit_gradient_aug(with_intercept(X), T, beta);
}

Eigen::MatrixXd probit_residuals(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::VectorXd>& Y,
                                 const Eigen::Ref<const Eigen::VectorXd>& T,
                                 const Eigen::Ref<const Eigen::VectorXd>& beta, bool joint) {
  const Eigen::VectorXd z = with_intercept(X) * beta;
  Eigen::MatrixXd out(z.size(), joint ? 2 : 1);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double P = normal_cdf(z(i));
    out(i, 0) = T(i) - P;
    if (joint) out(i, 1) = Y(i) * (T(i) - P) / (P * (1.0 - P));
  }
  return out;
}

FittedModel fit_probit(const Eigen::Ref<const Eigen::MatrixXd>& X,
                       const Eigen::Ref<const Eigen::VectorXd>& T) {
  const Eigen::Index n = X.rows();
  require(T.size() == n, "fit_probit: treatment length differs from covariate rows");
  require(n > X.cols() + 1, "fit_probit: need more observations than parameters");
  require_finite(X, "covariate matrix");
  validate_binary(T);

  const Eigen::MatrixXd Xa = with_intercept(X);
  const Eigen::VectorXd Tv = T;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(Xa.cols());
  double ll = probit_loglik(Xa, Tv, beta);
  constexpr double kGradTol = 1e-8;
  constexpr int kMaxIter = 100;

  bool converged = false;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd z = Xa * beta;
    Eigen::VectorXd w(n), curvature(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w(i) = probit_weight(Tv(i), z(i));
      curvature(i) = w(i) * (w(i) + z(i));
    }
    const Eigen::VectorXd grad = Xa.transpose() * w;
    const Eigen::MatrixXd info = Xa.transpose() * curvature.asDiagonal() * Xa;
    Eigen::VectorXd step;
    const Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() == Eigen::Success) {
      step = llt.solve(grad);
    } else {
      step = info.completeOrthogonalDecomposition().solve(grad);
    }
    if (grad.norm() <= kGradTol) {
      // Under separation gradient and information vanish together, so the
      // gradient test passes while the Newton step stays large.
      if (step.norm() > 1e-3 * (1.0 + beta.norm())) {
        throw EstimationError("fit_probit: likelihood keeps increasing along a direction (|step| = " +
                              std::to_string(step.norm()) + "); data look separated");
      }
      converged = true;
      break;
    }

    double t = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half, t *= 0.5) {
      const Eigen::VectorXd trial = beta + t * step;
      const double trial_ll = probit_loglik(Xa, Tv, trial);
      // Near the optimum the log-likelihood changes below its rounding error.
      if (std::isfinite(trial_ll) && trial_ll >= ll - 1e-12 * (1.0 + std::abs(ll))) {
        beta = trial;
        ll = trial_ll;
        improved = true;
        break;
      }
    }
    if (!improved) {
      // No ascent left at machine precision; accept if the gradient is tiny
      // relative to the information scale.
      converged = grad.norm() <= 1e-6;
      break;
    }
  }
  if (!converged) {
    throw EstimationError("fit_probit: Newton-Raphson did not converge in " +
                          std::to_string(kMaxIter) +
                          " iterations (possible separation)");
  }
  const Eigen::VectorXd z = Xa * beta;
  if (z.cwiseAbs().maxCoeff() > 35.0) {
    throw EstimationError("fit_probit: fitted index diverged (|x'beta| > 35); data look separated");
  }

  FittedModel fm;
  fm.tag = ModelTag::probit;
  fm.theta_hat = beta;
  fm.residuals.resize(n, 1);
  Eigen::MatrixXd G(n, Xa.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    fm.residuals(i, 0) = Tv(i) - normal_cdf(z(i));
    G.row(i) = -normal_pdf(z(i)) * Xa.row(i);
  }
  fm.scores.push_back(std::move(G));
  return fm;
}

FittedModel joint_cate_residuals(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::VectorXd>& Y,
                                 const Eigen::Ref<const Eigen::VectorXd>& T,
                                 const FittedModel& fitted_probit) {
  const Eigen::Index n = X.rows();
  require(Y.size() == n && T.size() == n, "joint_cate_residuals: length mismatch");
  require(fitted_probit.theta_hat.size() == X.cols() + 1,
          "joint_cate_residuals: probit parameter has wrong length for these covariates");
  require_finite(Y, "outcome vector");

  const Eigen::MatrixXd Xa = with_intercept(X);
  const Eigen::VectorXd z = Xa * fitted_probit.theta_hat;

  std::ostringstream bad;
  int bad_count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double P = normal_cdf(z(i));
    if (!(P > kOverlapGuard && P < 1.0 - kOverlapGuard)) {
      if (bad_count < 20) bad << ' ' << (i + 1);
      ++bad_count;
    }
  }
  if (bad_count > 0) {
    throw InputError("joint_cate_residuals: fitted propensity outside (1e-6, 1-1e-6) at " +
                     std::to_string(bad_count) + " row(s):" + bad.str());
  }

  FittedModel fm;
  fm.tag = ModelTag::probit_cate_joint;
  fm.theta_hat = fitted_probit.theta_hat;
  fm.residuals.resize(n, 2);
  Eigen::MatrixXd G1(n, Xa.cols()), G2(n, Xa.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const double P = normal_cdf(z(i));
    const double dens = normal_pdf(z(i));
    const double v = P * (1.0 - P);
    fm.residuals(i, 0) = T(i) - P;
    fm.residuals(i, 1) = Y(i) * (T(i) - P) / v;
    // d/dP [(T - P) / (P (1 - P))] = (-v - (T - P)(1 - 2P)) / v^2
    const double d_dP = Y(i) * (-v - (T(i) - P) * (1.0 - 2.0 * P)) / (v * v);
    G1.row(i) = -dens * Xa.row(i);
    G2.row(i) = d_dP * dens * Xa.row(i);
  }
  fm.scores.push_back(std::move(G1));
  fm.scores.push_back(std::move(G2));
  return fm;
}

}  // namespace kcheck
