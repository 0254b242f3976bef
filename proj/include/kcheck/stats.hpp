#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "kcheck/context.hpp"

namespace kcheck {

/// proj1/proj2/rand1/rand2 are the KRR statistics; kcm is the plain
/// (1/n) eps'K eps form, reported as gp or icm when used as a benchmark.
enum class StatName { proj1, proj2, rand1, rand2, kcm, gp, icm };

std::string_view to_string(StatName name);
/// Parses a statistic name; throws InputError on unknown names.
StatName parse_stat_name(std::string_view text);
bool is_random_location(StatName name);
bool is_krr(StatName name);

struct StatScale {
  Eigen::Index n = 0;
  double lambda = 0.0;
  double gamma = 0.0;
  std::optional<Eigen::Index> J;
};

struct StatValue {
  StatName name = StatName::proj1;
  double value = 0.0;
  StatScale scale;
};

/// Multivariate normal fitted to the covariates; the sampling law for
/// random locations.
struct LocationSampler {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct LocationProvenance {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  std::uint64_t seed = 0;
  bool diagonal_fallback = false;
};

/// J locations drawn once per test invocation; shared by the observed
/// statistic and every bootstrap replicate.
struct LocationSet {
  Eigen::MatrixXd points;  // J x d
  LocationProvenance provenance;

  Eigen::Index J() const { return points.rows(); }
};

/// Sample mean and (n-1)-divisor covariance, plus ridge * (trace / d) on the
/// diagonal. A zero-trace covariance falls back to 1e-8 * I.
LocationSampler fit_location_sampler(const Eigen::Ref<const Eigen::MatrixXd>& X, double ridge = 1e-8);

/// J draws from N(mean, covariance). If the covariance cannot be Cholesky
/// factored, only its diagonal is used and provenance records the fallback.
LocationSet sample_locations(const LocationSampler& sampler, Eigen::Index J, std::uint64_t seed);

/// n * sum_r a_r' K a_r,  a_r = (K + n lambda I)^{-1} eps_r.
StatValue stat_proj1(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx);
/// sum_r eps_r' (K + n lambda I)^{-1} K eps_r.
StatValue stat_proj2(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx);
/// n * sum_r sum_j (eps_r' (K + n lambda I)^{-1} k(v_j))^2.
StatValue stat_rand1(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx,
                     const Eigen::Ref<const Eigen::MatrixXd>& kV);
/// n * sum_r (sum_j eps_r' (K + n lambda I)^{-1} k(v_j))^2.
StatValue stat_rand2(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx,
                     const Eigen::Ref<const Eigen::MatrixXd>& kV);
/// (1/n) sum_r eps_r' K eps_r; `label` is kcm, gp or icm.
StatValue stat_kcm(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx,
                   StatName label = StatName::kcm);
double kcm_value(const Eigen::Ref<const Eigen::MatrixXd>& eps, const Eigen::Ref<const Eigen::MatrixXd>& K);

/// Dispatch by name; kV is required for rand1/rand2 and ignored otherwise.
StatValue compute_statistic(StatName name, const Eigen::Ref<const Eigen::MatrixXd>& eps,
                            const KernelContext& ctx, const Eigen::MatrixXd* kV = nullptr);

}  // namespace kcheck
