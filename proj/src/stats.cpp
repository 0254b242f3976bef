#include "kcheck/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kcheck/error.hpp"
#include "kcheck/rng.hpp"

namespace kcheck {

std::string_view to_string(StatName name) {
  switch (name) {
    case StatName::proj1: return "proj1";
    case StatName::proj2: return "proj2";
    case StatName::rand1: return "rand1";
    case StatName::rand2: return "rand2";
    case StatName::kcm: return "kcm";
    case StatName::gp: return "gp";
    case StatName::icm: return "icm";
  }
  return "unknown";
}

StatName parse_stat_name(std::string_view text) {
  for (StatName s : {StatName::proj1, StatName::proj2, StatName::rand1, StatName::rand2,
                     StatName::kcm, StatName::gp, StatName::icm}) {
    if (to_string(s) == text) return s;
  }
  throw InputError("unknown statistic '" + std::string(text) +
                   "' (expected proj1, proj2, rand1, rand2, kcm, gp or icm)");
}

bool is_random_location(StatName name) { return name == StatName::rand1 || name == StatName::rand2; }

bool is_krr(StatName name) {
  return name == StatName::proj1 || name == StatName::proj2 || is_random_location(name);
}

// ---------------------------------------------------------------- locations

LocationSampler fit_location_sampler(const Eigen::Ref<const Eigen::MatrixXd>& X, double ridge) {
  require(X.rows() >= 2, "fit_location_sampler: need at least two observations");
  require(X.cols() >= 1, "fit_location_sampler: need at least one covariate");
  require(ridge >= 0.0, "fit_location_sampler: ridge must be nonnegative");
  const double n = static_cast<double>(X.rows());
  const auto d = X.cols();
  LocationSampler s;
  s.mean = X.colwise().mean().transpose();
  const Eigen::MatrixXd centered = X.rowwise() - s.mean.transpose();
  s.covariance = centered.transpose() * centered / (n - 1.0);
  const double trace = s.covariance.trace();
  if (trace > 0.0) {
    s.covariance.diagonal().array() += ridge * trace / static_cast<double>(d);
  } else {
    s.covariance = 1e-8 * Eigen::MatrixXd::Identity(d, d);
  }
  return s;
}

LocationSet sample_locations(const LocationSampler& sampler, Eigen::Index J, std::uint64_t seed) {
  require(J >= 1, "sample_locations: J must be at least 1");
  const Eigen::Index d = sampler.mean.size();
  require(sampler.covariance.rows() == d && sampler.covariance.cols() == d,
          "sample_locations: covariance shape does not match mean");

  LocationSet out;
  out.provenance.mean = sampler.mean;
  out.provenance.covariance = sampler.covariance;
  out.provenance.seed = seed;

  Eigen::MatrixXd L;
  Eigen::LLT<Eigen::MatrixXd> llt(sampler.covariance);
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    L = sampler.covariance.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    out.provenance.diagonal_fallback = true;
  }

  Rng rng(seed);
  std::normal_distribution<double> normal;
  out.points.resize(J, d);
  Eigen::VectorXd z(d);
  for (Eigen::Index j = 0; j < J; ++j) {
    for (Eigen::Index c = 0; c < d; ++c) z(c) = normal(rng);
    out.points.row(j) = (sampler.mean + L * z).transpose();
  }
  return out;
}

// ---------------------------------------------------------------- statistics

namespace {

void check_residuals(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx) {
  if (eps.rows() != ctx.n()) {
    throw InputError("statistic: residual rows " + std::to_string(eps.rows()) +
                     " do not match kernel size " + std::to_string(ctx.n()));
  }
}

void check_locations(const Eigen::Ref<const Eigen::MatrixXd>& kV, const KernelContext& ctx) {
  if (kV.rows() != ctx.n() || kV.cols() < 1) {
    throw InputError("statistic: location kernel matrix must be n x J with J >= 1");
  }
}

StatValue make_value(StatName name, double value, const KernelContext& ctx,
                     std::optional<Eigen::Index> J = std::nullopt) {
  return StatValue{name, std::max(0.0, value),
                   StatScale{ctx.n(), ctx.lambda(), ctx.kernel().gamma, J}};
}

}  // namespace

StatValue stat_proj1(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx) {
  check_residuals(eps, ctx);
  const Eigen::MatrixXd alpha = ctx.factor().solve(eps);
  const double value = static_cast<double>(ctx.n()) * (alpha.cwiseProduct(ctx.K() * alpha)).sum();
  return make_value(StatName::proj1, value, ctx);
}

StatValue stat_proj2(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx) {
  check_residuals(eps, ctx);
  const Eigen::MatrixXd alpha = ctx.factor().solve(eps);
  const double value = (eps.cwiseProduct(ctx.K() * alpha)).sum();
  return make_value(StatName::proj2, value, ctx);
}

StatValue stat_rand1(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx,
                     const Eigen::Ref<const Eigen::MatrixXd>& kV) {
  check_residuals(eps, ctx);
  check_locations(kV, ctx);
  const Eigen::MatrixXd alpha = ctx.factor().solve(eps);
  const Eigen::MatrixXd w = alpha.transpose() * kV;  // q x J witness values
  const double value = static_cast<double>(ctx.n()) * w.squaredNorm();
  return make_value(StatName::rand1, value, ctx, kV.cols());
}

StatValue stat_rand2(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx,
                     const Eigen::Ref<const Eigen::MatrixXd>& kV) {
  check_residuals(eps, ctx);
  check_locations(kV, ctx);
  const Eigen::MatrixXd alpha = ctx.factor().solve(eps);
  const Eigen::VectorXd sums = (alpha.transpose() * kV).rowwise().sum();
  const double value = static_cast<double>(ctx.n()) * sums.squaredNorm();
  return make_value(StatName::rand2, value, ctx, kV.cols());
}

double kcm_value(const Eigen::Ref<const Eigen::MatrixXd>& eps,
                 const Eigen::Ref<const Eigen::MatrixXd>& K) {
  if (eps.rows() != K.rows()) throw InputError("kcm: residual rows do not match kernel size");
  return (eps.cwiseProduct(K * eps)).sum() / static_cast<double>(K.rows());
}

StatValue stat_kcm(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx,
                   StatName label) {
  check_residuals(eps, ctx);
  require(label == StatName::kcm || label == StatName::gp || label == StatName::icm,
          "stat_kcm: label must be kcm, gp or icm");
  return make_value(label, kcm_value(eps, ctx.K()), ctx);
}

StatValue compute_statistic(StatName name, const Eigen::Ref<const Eigen::MatrixXd>& eps,
                            const KernelContext& ctx, const Eigen::MatrixXd* kV) {
  switch (name) {
    case StatName::proj1: return stat_proj1(eps, ctx);
    case StatName::proj2: return stat_proj2(eps, ctx);
    case StatName::rand1:
    case StatName::rand2:
      if (kV == nullptr) throw InputError("random-location statistic requires locations");
      return name == StatName::rand1 ? stat_rand1(eps, ctx, *kV) : stat_rand2(eps, ctx, *kV);
    case StatName::kcm:
    case StatName::gp:
    case StatName::icm: return stat_kcm(eps, ctx, name);
  }
  throw InputError("unknown statistic");
}

}  // namespace kcheck
