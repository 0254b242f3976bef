#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace kcheck {

enum class ModelTag { ols, probit, probit_cate_joint };

std::string_view to_string(ModelTag tag);

/// Output of a residual provider: parameter estimate, residual columns
/// (n x q) and, per residual column r, the n x p score matrix whose row i is
/// the gradient of eps_r(s_i; theta) at theta_hat.
struct FittedModel {
  Eigen::VectorXd theta_hat;
  Eigen::MatrixXd residuals;
  std::vector<Eigen::MatrixXd> scores;
  ModelTag tag = ModelTag::ols;

  Eigen::Index n() const { return residuals.rows(); }
  Eigen::Index q() const { return residuals.cols(); }
  /// Throws InputError unless residuals and scores agree in shape.
  void validate() const;
};

/// [1, X]
Eigen::MatrixXd with_intercept(const Eigen::Ref<const Eigen::MatrixXd>& X);

/// Least squares of Y on [1, X]. Scores are -[1, X].
FittedModel fit_ols(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& Y);

/// Probit maximum likelihood of T on [1, X] by Newton-Raphson with step
/// halving from beta = 0. Converges when ||grad|| <= 1e-8, gives up after 100
/// iterations. Residual is T - Phi(x'beta); score row is -phi(x'beta) x.
FittedModel fit_probit(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& T);

/// Two-component residual for the joint propensity / zero-CATE hypothesis:
///   eps_1 = T - Phi,   eps_2 = Y (T - Phi) / (Phi (1 - Phi)),  Phi = Phi(x'beta_hat).
/// Requires every fitted propensity inside (1e-6, 1 - 1e-6).
FittedModel joint_cate_residuals(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::VectorXd>& Y,
                                 const Eigen::Ref<const Eigen::VectorXd>& T,
                                 const FittedModel& fitted_probit);

/// Residual maps as functions of theta, for finite-difference checks and for
/// rebuilding residuals at a perturbed parameter.
Eigen::VectorXd ols_residual(const Eigen::Ref<const Eigen::MatrixXd>& X,
                             const Eigen::Ref<const Eigen::VectorXd>& Y,
                             const Eigen::Ref<const Eigen::VectorXd>& theta);
Eigen::MatrixXd probit_residuals(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                 const Eigen::Ref<const Eigen::VectorXd>& Y,
                                 const Eigen::Ref<const Eigen::VectorXd>& T,
                                 const Eigen::Ref<const Eigen::VectorXd>& beta, bool joint);

/// Probit log-likelihood gradient at beta.
Eigen::VectorXd probit_gradient(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const Eigen::Ref<const Eigen::VectorXd>& T,
                                const Eigen::Ref<const Eigen::VectorXd>& beta);

double normal_cdf(double z);
double normal_pdf(double z);

inline constexpr double kOverlapGuard = 1e-6;

}  // namespace kcheck
