#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kcheck/context.hpp"
#include "kcheck/models.hpp"
#include "kcheck/stats.hpp"

namespace kcheck {

enum class MultiplierFamily { mammen, rademacher };

/// Replicate b draws its multipliers from split_seed(master_seed, b), so the
/// replicate set is a pure function of the plan whatever the worker count.
struct BootstrapPlan {
  Eigen::Index replicates = 199;
  std::uint64_t master_seed = 0;
  MultiplierFamily family = MultiplierFamily::mammen;
  unsigned workers = 1;
  bool keep_values = false;
  /// Divide each residual by the square root of the matching projector
  /// diagonal before multiplying by V.
  bool leverage_adjust = false;

  void validate() const;
};

struct TestReport {
  StatValue statistic;
  double p_value = 1.0;
  Eigen::Index replicates = 0;
  std::optional<Eigen::VectorXd> bootstrap_values;
  std::optional<LocationSet> locations;
};

/// Mammen two-point law: (1 - sqrt5)/2 with probability (1 + sqrt5)/(2 sqrt5),
/// (1 + sqrt5)/2 otherwise. Mean 0, variance 1.
Eigen::VectorXd mammen_multipliers(Eigen::Index n, std::uint64_t seed);
Eigen::VectorXd rademacher_multipliers(Eigen::Index n, std::uint64_t seed);
Eigen::VectorXd draw_multipliers(MultiplierFamily family, Eigen::Index n, std::uint64_t seed);

inline constexpr double kMammenLow = -0.6180339887498948482;   // (1 - sqrt5) / 2
inline constexpr double kMammenHigh = 1.6180339887498948482;   // (1 + sqrt5) / 2
inline constexpr double kMammenLowProb = 0.7236067977499789696;  // (1 + sqrt5) / (2 sqrt5)

/// (1 + #{b : replicate_b >= observed}) / (B + 1).
double bootstrap_p_value(double observed, std::span<const double> replicates);

/// One statistic to bootstrap. `ctx` must outlive the call; `locations` is
/// required for rand1/rand2.
struct TestRequest {
  StatName statistic;
  const KernelContext* ctx = nullptr;
  const LocationSet* locations = nullptr;
};

/// Multiplier bootstrap for several statistics over the same replicates.
///
/// The observed statistic uses Pi_r eps_r per residual column. Replicate b
/// perturbs the raw residuals elementwise by one multiplier vector V_b shared
/// across columns, then projects: Pi_r (eps_r .* V_b). Projectors, kernel
/// factorizations and locations are fixed across replicates.
std::vector<TestReport> bootstrap_tests(const FittedModel& fm, std::span<const TestRequest> requests,
                                        const BootstrapPlan& plan);

TestReport bootstrap_test(const FittedModel& fm, const KernelContext& ctx, StatName statistic,
                          const BootstrapPlan& plan, const LocationSet* locations = nullptr);

/// OLS refit on y_hat + eps_hat .* V; the building block of wild_bootstrap_icm.
FittedModel wild_refit(const Eigen::Ref<const Eigen::MatrixXd>& X, const FittedModel& ols_fit,
                       const Eigen::Ref<const Eigen::VectorXd>& Y,
                       const Eigen::Ref<const Eigen::VectorXd>& multipliers);

/// ICM benchmark: (1/n) eps' K eps with a Gaussian kernel of fixed gamma,
/// calibrated by the wild bootstrap with re-estimation of the OLS fit in
/// every replicate.
TestReport wild_bootstrap_icm(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::VectorXd>& Y, const BootstrapPlan& plan,
                              double gamma = 0.5);

}  // namespace kcheck
