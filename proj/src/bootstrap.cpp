#include "kcheck/bootstrap.hpp"

#include <map>
#include <string>

#include "kcheck/error.hpp"
#include "kcheck/orthogonal.hpp"
#include "kcheck/parallel.hpp"
#include "kcheck/rng.hpp"

namespace kcheck {

void BootstrapPlan::validate() const {
  require(replicates >= 1, "bootstrap: number of replicates B must be at least 1");
}

Eigen::VectorXd mammen_multipliers(Eigen::Index n, std::uint64_t seed) {
  require(n >= 1, "mammen_multipliers: n must be at least 1");
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = uniform01(rng) < kMammenLowProb ? kMammenLow : kMammenHigh;
  }
  return v;
}

Eigen::VectorXd rademacher_multipliers(Eigen::Index n, std::uint64_t seed) {
  require(n >= 1, "rademacher_multipliers: n must be at least 1");
  Rng rng(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = (rng() >> 63) ? 1.0 : -1.0;
  return v;
}

Eigen::VectorXd draw_multipliers(MultiplierFamily family, Eigen::Index n, std::uint64_t seed) {
  return family == MultiplierFamily::mammen ? mammen_multipliers(n, seed)
                                            : rademacher_multipliers(n, seed);
}

double bootstrap_p_value(double observed, std::span<const double> replicates) {
  std::size_t exceed = 0;
  for (double t : replicates) exceed += t >= observed;
  return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(replicates.size()) + 1.0);
}

namespace {

// Evaluates every request on one residual matrix, sharing the KRR solve
// between requests that use the same kernel context.
class StatisticBank {
 public:
  explicit StatisticBank(std::span<const TestRequest> requests) : requests_(requests) {
    for (const auto& req : requests) {
      if (req.ctx == nullptr) throw InputError("bootstrap: test request without kernel context");
      if (is_random_location(req.statistic)) {
        if (req.locations == nullptr) {
          throw InputError(std::string("bootstrap: ") + std::string(to_string(req.statistic)) +
                           " needs a location set");
        }
        kv_.push_back(req.ctx->cross(req.locations->points));
      } else {
        kv_.emplace_back();
      }
      if (is_krr(req.statistic) && !req.ctx->regularized()) {
        throw InputError("bootstrap: KRR statistics need a regularized kernel context");
      }
    }
  }

  std::vector<double> evaluate(const Eigen::MatrixXd& eps) const {
    std::map<const KernelContext*, std::pair<Eigen::MatrixXd, Eigen::MatrixXd>> krr;  // alpha, K alpha
    std::map<const KernelContext*, double> kcm;
    std::vector<double> out(requests_.size());
    for (std::size_t i = 0; i < requests_.size(); ++i) {
      const auto& req = requests_[i];
      const KernelContext& ctx = *req.ctx;
      if (eps.rows() != ctx.n()) throw InputError("bootstrap: residual rows do not match kernel size");
      const double n = static_cast<double>(ctx.n());
      if (!is_krr(req.statistic)) {
        auto it = kcm.find(&ctx);
        if (it == kcm.end()) it = kcm.emplace(&ctx, kcm_value(eps, ctx.K())).first;
        out[i] = std::max(0.0, it->second);
        continue;
      }
      auto it = krr.find(&ctx);
      if (it == krr.end()) {
        Eigen::MatrixXd alpha = ctx.factor().solve(eps);
        Eigen::MatrixXd k_alpha = ctx.K() * alpha;
        it = krr.emplace(&ctx, std::make_pair(std::move(alpha), std::move(k_alpha))).first;
      }
      const auto& [alpha, k_alpha] = it->second;
      double value = 0.0;
      switch (req.statistic) {
        case StatName::proj1: value = n * alpha.cwiseProduct(k_alpha).sum(); break;
        case StatName::proj2: value = eps.cwiseProduct(k_alpha).sum(); break;
        case StatName::rand1: value = n * (alpha.transpose() * kv_[i]).squaredNorm(); break;
        case StatName::rand2:
          value = n * (alpha.transpose() * kv_[i]).rowwise().sum().squaredNorm();
          break;
        default: break;
      }
      out[i] = std::max(0.0, value);
    }
    return out;
  }

  StatValue describe(std::size_t i, double value) const {
    const auto& req = requests_[i];
    StatScale scale{req.ctx->n(), req.ctx->lambda(), req.ctx->kernel().gamma, std::nullopt};
    if (is_random_location(req.statistic)) scale.J = req.locations->J();
    return StatValue{req.statistic, value, scale};
  }

 private:
  std::span<const TestRequest> requests_;
  std::vector<Eigen::MatrixXd> kv_;
};

}  // namespace

std::vector<TestReport> bootstrap_tests(const FittedModel& fm, std::span<const TestRequest> requests,
                                        const BootstrapPlan& plan) {
  plan.validate();
  fm.validate();
  const StatisticBank bank(requests);
  const std::vector<Projector> projectors = build_projectors(fm);
  const Eigen::MatrixXd observed_eps = orthogonalize(projectors, fm.residuals);
  const std::vector<double> observed = bank.evaluate(observed_eps);

  Eigen::MatrixXd base = fm.residuals;
  if (plan.leverage_adjust) {
    for (Eigen::Index r = 0; r < base.cols(); ++r) {
      const Eigen::VectorXd keep = projectors[static_cast<std::size_t>(r)].diagonal();
      base.col(r).array() /= keep.array().max(1e-12).sqrt();
    }
  }

  const auto B = static_cast<std::size_t>(plan.replicates);
  std::vector<std::vector<double>> draws(B);
  parallel_for(B, plan.workers, [&](std::size_t b) {
    const Eigen::VectorXd V = draw_multipliers(plan.family, fm.n(), split_seed(plan.master_seed, b));
    const Eigen::MatrixXd perturbed = base.array().colwise() * V.array();
    draws[b] = bank.evaluate(orthogonalize(projectors, perturbed));
  });

  std::vector<TestReport> reports;
  reports.reserve(requests.size());
  std::vector<double> column(B);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    for (std::size_t b = 0; b < B; ++b) column[b] = draws[b][i];
    TestReport report;
    report.statistic = bank.describe(i, observed[i]);
    report.p_value = bootstrap_p_value(observed[i], column);
    report.replicates = plan.replicates;
    if (plan.keep_values) {
      report.bootstrap_values = Eigen::Map<const Eigen::VectorXd>(column.data(), plan.replicates);
    }
    if (requests[i].locations != nullptr && is_random_location(requests[i].statistic)) {
      report.locations = *requests[i].locations;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

TestReport bootstrap_test(const FittedModel& fm, const KernelContext& ctx, StatName statistic,
                          const BootstrapPlan& plan, const LocationSet* locations) {
  const TestRequest request{statistic, &ctx, locations};
  return bootstrap_tests(fm, std::span<const TestRequest>(&request, 1), plan).front();
}

FittedModel wild_refit(const Eigen::Ref<const Eigen::MatrixXd>& X, const FittedModel& ols_fit,
                       const Eigen::Ref<const Eigen::VectorXd>& Y,
                       const Eigen::Ref<const Eigen::VectorXd>& multipliers) {
  require(ols_fit.tag == ModelTag::ols, "wild bootstrap requires an OLS fit");
  require(multipliers.size() == Y.size(), "wild bootstrap: multiplier length mismatch");
  const Eigen::VectorXd fitted = Y - ols_fit.residuals.col(0);
  const Eigen::VectorXd y_star = fitted + ols_fit.residuals.col(0).cwiseProduct(multipliers);
  return fit_ols(X, y_star);
}

TestReport wild_bootstrap_icm(const Eigen::Ref<const Eigen::MatrixXd>& X,
                              const Eigen::Ref<const Eigen::VectorXd>& Y, const BootstrapPlan& plan,
                              double gamma) {
  plan.validate();
  const FittedModel fit = fit_ols(X, Y);
  const KernelContext ctx = KernelContext::unregularized(X, KernelConfig::gaussian(gamma));
  const StatValue observed = stat_kcm(fit.residuals, ctx, StatName::icm);

  const auto B = static_cast<std::size_t>(plan.replicates);
  std::vector<double> draws(B);
  parallel_for(B, plan.workers, [&](std::size_t b) {
    const Eigen::VectorXd V = draw_multipliers(plan.family, fit.n(), split_seed(plan.master_seed, b));
    const FittedModel refit = wild_refit(X, fit, Y, V);
    draws[b] = std::max(0.0, kcm_value(refit.residuals, ctx.K()));
  });

  TestReport report;
  report.statistic = observed;
  report.p_value = bootstrap_p_value(observed.value, draws);
  report.replicates = plan.replicates;
  if (plan.keep_values) report.bootstrap_values = Eigen::Map<const Eigen::VectorXd>(draws.data(), plan.replicates);
  return report;
}

}  // namespace kcheck
