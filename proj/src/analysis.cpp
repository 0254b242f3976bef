#include "kcheck/analysis.hpp"

#include <string>

#include "kcheck/context.hpp"
#include "kcheck/error.hpp"
#include "kcheck/kernels.hpp"
#include "kcheck/rng.hpp"

namespace kcheck {

const TestReport& TestSuiteResult::report(StatName name) const {
  for (const auto& r : reports) {
    if (r.statistic.name == name) return r;
  }
  throw InputError("no report for statistic " + std::string(to_string(name)));
}

TestSuiteResult run_tests(const Eigen::Ref<const Eigen::MatrixXd>& X, const FittedModel& fm,
                          const TestOptions& options) {
  fm.validate();
  require(X.rows() == fm.n(), "run_tests: covariate rows do not match residual rows");
  require(!options.statistics.empty(), "run_tests: no statistics requested");
  for (StatName s : options.statistics) {
    require(s != StatName::icm, "run_tests: icm uses the wild bootstrap; call wild_bootstrap_icm");
  }

  TestSuiteResult out;
  bool need_krr = false;
  bool need_locations = false;
  bool need_gp = false;
  for (StatName s : options.statistics) {
    need_krr |= is_krr(s);
    need_locations |= is_random_location(s);
    need_gp |= !is_krr(s);
  }

  std::optional<KernelContext> krr_ctx;
  if (need_krr) {
    TuningRecord& t = out.tuning;
    t.applied_rows = X.rows();
    if (options.gamma && options.lambda) {
      t.gamma = *options.gamma;
      t.lambda = *options.lambda;
    } else {
      TuneGrid grid = default_grid(X, split_seed(options.seed, streams::folds));
      grid.rule = options.cv_rule;
      if (options.gamma) grid.gamma_grid = {*options.gamma};
      if (options.lambda) grid.lambda_grid = {*options.lambda};
      TuneResult cv = tune(X, fm.residuals, grid);
      t.cross_validated = true;
      t.gamma = cv.gamma;
      t.lambda = cv.lambda;
      t.cv_score = cv.cv_score;
      t.folds = grid.folds;
      t.tuning_rows = X.rows();
      t.cv = std::move(cv);
    }
    krr_ctx.emplace(KernelContext::build(X, KernelConfig::gaussian(t.gamma), t.lambda));
  }

  if (need_locations) {
    const LocationSampler sampler = fit_location_sampler(X, options.location_ridge);
    out.locations = sample_locations(sampler, options.J, split_seed(options.seed, streams::locations));
  }

  std::optional<KernelContext> gp_ctx;
  if (need_gp) {
    out.gp_gamma = options.gp_gamma ? *options.gp_gamma : median_heuristic(X);
    gp_ctx.emplace(KernelContext::unregularized(X, KernelConfig::gaussian(out.gp_gamma)));
  }

  std::vector<TestRequest> requests;
  for (StatName s : options.statistics) {
    const KernelContext* ctx = is_krr(s) ? &*krr_ctx : &*gp_ctx;
    requests.push_back(TestRequest{s, ctx, is_random_location(s) ? &*out.locations : nullptr});
  }

  BootstrapPlan plan;
  plan.replicates = options.B;
  plan.master_seed = split_seed(options.seed, streams::bootstrap);
  plan.family = options.family;
  plan.workers = options.workers;
  plan.keep_values = options.keep_bootstrap_values;
  plan.leverage_adjust = options.leverage_adjust;
  out.reports = bootstrap_tests(fm, requests, plan);
  return out;
}

}  // namespace kcheck
