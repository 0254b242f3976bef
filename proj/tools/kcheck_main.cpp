// kcheck: kernel ridge regression specification tests for conditional moment
// restriction models.
//
//   kcheck test --input data.csv --y-col y --x-cols x1,x2 --statistic proj1,rand1 --B 500
//   kcheck test --input nsw_dw.csv --preprocess nsw --B 500
//   kcheck simulate --dgp dgp0,dgp3 --n 200 --R 200 --B 199
//   kcheck witness --dgp fig1_dgp1 --n 500
//   kcheck tune --input data.csv --y-col y
//   kcheck power-vs-j --dgp dgp2 --J-values 1,3,5,7 --R 100
//
// Exit codes: 0 success, 2 input or IO error, 3 numerical failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "config.hpp"
#include "kcheck/analysis.hpp"
#include "kcheck/bootstrap.hpp"
#include "kcheck/context.hpp"
#include "kcheck/dataset.hpp"
#include "kcheck/error.hpp"
#include "kcheck/models.hpp"
#include "kcheck/nsw.hpp"
#include "kcheck/orthogonal.hpp"
#include "kcheck/report.hpp"
#include "kcheck/rng.hpp"
#include "kcheck/simulate.hpp"
#include "kcheck/tuning.hpp"
#include "kcheck/witness.hpp"

namespace {

using namespace kcheck;
using cli::RunConfig;

bool nsw_mode(const RunConfig& cfg) {
  if (cfg.preprocess.empty()) return false;
  require(cfg.preprocess == "nsw", "unknown --preprocess '" + cfg.preprocess + "' (expected nsw)");
  return true;
}

Dataset load_input(const RunConfig& cfg) {
  require(!cfg.input.empty(), cfg.command + " needs --input (or --dgp where supported)");
  const bool nsw = nsw_mode(cfg);
  CsvSchema schema = nsw ? nsw_schema() : CsvSchema{"y", "", {}};
  if (!cfg.y_col.empty()) schema.y_col = cfg.y_col;
  if (!cfg.t_col.empty()) schema.t_col = cfg.t_col;
  schema.x_cols = cfg.x_cols;
  Dataset ds = ingest_csv(cfg.input, schema);

  std::cerr << "read " << ds.n() << " rows from " << cfg.input << "; outcome " << ds.outcome_name;
  if (ds.T) std::cerr << ", treatment " << ds.treatment_name;
  std::cerr << ", covariates";
  for (const auto& name : ds.covariate_names) std::cerr << ' ' << name;
  std::cerr << '\n';

  if (nsw) {
    ds = preprocess_nsw(ds);
    std::cerr << "NSW preprocessing: age/10, educ/10, log1p earnings; " << ds.d() << " covariates\n";
  }
  return ds;
}

DgpSpec dgp_spec(const RunConfig& cfg, const std::string& name) {
  DgpSpec spec;
  spec.id = parse_dgp_id(name);
  spec.n = cfg.n;
  if (cfg.d) {
    spec.d = *cfg.d;
  } else if (name.rfind("fig1_", 0) == 0) {
    spec.d = 2;
  } else if (name.size() > 5 && name.substr(name.size() - 5) == "_star") {
    spec.d = 20;
  } else {
    spec.d = 10;
  }
  spec.seed = cfg.seed;
  return spec;
}

TestOptions test_options(const RunConfig& cfg) {
  TestOptions opt;
  opt.statistics.clear();
  for (const auto& s : cfg.statistics) {
    const StatName name = parse_stat_name(s);
    if (name != StatName::icm) opt.statistics.push_back(name);
  }
  opt.B = cfg.B;
  opt.J = cfg.J;
  opt.seed = cfg.seed;
  opt.gamma = cli::parse_tuning_value(cfg.gamma, "gamma");
  opt.lambda = cli::parse_tuning_value(cfg.lambda, "lambda");
  opt.gp_gamma = cli::parse_tuning_value(cfg.gp_gamma, "gp-gamma");
  opt.cv_rule = cli::parse_cv_rule(cfg.cv_rule);
  if (cfg.multipliers == "mammen") {
    opt.family = MultiplierFamily::mammen;
  } else if (cfg.multipliers == "rademacher") {
    opt.family = MultiplierFamily::rademacher;
  } else {
    throw InputError("unknown --multipliers '" + cfg.multipliers + "'");
  }
  opt.leverage_adjust = cfg.leverage_adjust;
  opt.workers = cfg.workers;
  return opt;
}

bool wants_icm(const RunConfig& cfg) {
  for (const auto& s : cfg.statistics) {
    if (parse_stat_name(s) == StatName::icm) return true;
  }
  return false;
}

ReportSection make_section(std::string label, const FittedModel& fm, const Eigen::MatrixXd& X,
                           TestSuiteResult suite) {
  ReportSection s;
  s.label = std::move(label);
  s.model = fm.tag;
  s.n = fm.n();
  s.d = X.cols();
  s.q = fm.q();
  s.theta_hat = fm.theta_hat;
  s.suite = std::move(suite);
  return s;
}

FittedModel fit_model(const Dataset& ds, const std::string& model) {
  if (model == "ols") return fit_ols(ds.X, ds.Y);
  if (model == "probit" || model == "probit_cate_joint") {
    require(ds.T.has_value(), "--model " + model + " needs --t-col");
    const FittedModel probit = fit_probit(ds.X, *ds.T);
    if (model == "probit") return probit;
    return joint_cate_residuals(ds.X, ds.Y, *ds.T, probit);
  }
  throw InputError("unknown --model '" + model + "' (expected ols, probit, probit_cate_joint)");
}

int cmd_test(const RunConfig& cfg) {
  const Dataset ds = load_input(cfg);
  TestOptions opt = test_options(cfg);
  RunReport report;
  report.command = "test";
  report.input = cfg.input;
  report.seed = cfg.seed;
  report.B = cfg.B;
  report.J = cfg.J;
  report.level = cfg.level;
  report.family = opt.family;
  report.leverage_adjust = opt.leverage_adjust;
  require(cfg.level > 0.0 && cfg.level < 1.0, "--level must lie in (0, 1)");

  if (nsw_mode(cfg) && cfg.model.empty()) {
    require(!opt.statistics.empty(), "NSW tests need at least one multiplier-bootstrap statistic");
    const NswResult r = run_nsw_tests(ds, opt);
    const FittedModel joint = joint_cate_residuals(ds.X, ds.Y, *ds.T, r.probit);
    report.sections.push_back(make_section("individual", r.probit, ds.X, r.individual));
    report.sections.push_back(make_section("joint", joint, ds.X, r.joint));
  } else {
    const std::string model = cfg.model.empty() ? "ols" : cfg.model;
    const FittedModel fm = fit_model(ds, model);
    TestSuiteResult suite;
    if (!opt.statistics.empty()) suite = run_tests(ds.X, fm, opt);
    if (wants_icm(cfg)) {
      require(model == "ols", "icm is only available for the ols model");
      BootstrapPlan plan;
      plan.replicates = cfg.B;
      plan.master_seed = split_seed(cfg.seed, streams::benchmark);
      plan.workers = cfg.workers;
      suite.reports.push_back(wild_bootstrap_icm(ds.X, ds.Y, plan));
    }
    report.sections.push_back(make_section(model, fm, ds.X, std::move(suite)));
  }

  const auto dir = cli::output_dir(cfg);
  emit_report(report, dir);
  std::cout << report_text(report);
  std::cerr << "wrote " << (dir / "report.json").string() << " and " << (dir / "report.txt").string() << '\n';
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  std::vector<CellResult> cells;
  for (const auto& name : cfg.dgps) {
    ExperimentSpec spec;
    spec.dgp = dgp_spec(cfg, name);
    spec.statistics.clear();
    for (const auto& s : cfg.statistics) spec.statistics.push_back(parse_stat_name(s));
    spec.R = cfg.R;
    spec.B = cfg.B;
    spec.J = cfg.J;
    spec.level = cfg.level;
    spec.seed = cfg.seed;
    spec.gamma = cli::parse_tuning_value(cfg.gamma, "gamma");
    spec.lambda = cli::parse_tuning_value(cfg.lambda, "lambda");
    spec.cv_rule = cli::parse_cv_rule(cfg.cv_rule);
    spec.leverage_adjust = cfg.leverage_adjust;
    spec.workers = cfg.workers;
    std::cerr << "simulating " << name << " (n = " << spec.dgp.n << ", d = " << spec.dgp.d
              << ", R = " << spec.R << ", B = " << spec.B << ")\n";
    cells.push_back(run_cell(spec));
    for (StatName s : spec.statistics) {
      std::cout << name << ' ' << to_string(s) << ' ' << cells.back().rejection_rate(s) << " (se "
                << cells.back().mc_se(s) << ")\n";
    }
  }
  const auto dir = cli::output_dir(cfg);
  std::filesystem::create_directories(dir);
  write_cells_csv(cells, dir / "simulate.csv");
  std::cerr << "wrote " << (dir / "simulate.csv").string() << '\n';
  return 0;
}

int cmd_power_vs_j(const RunConfig& cfg) {
  require(cfg.dgps.size() == 1, "power-vs-j takes exactly one --dgp");
  ExperimentSpec spec;
  spec.dgp = dgp_spec(cfg, cfg.dgps.front());
  spec.statistics = {StatName::rand1, StatName::rand2};
  spec.R = cfg.R;
  spec.B = cfg.B;
  spec.level = cfg.level;
  spec.seed = cfg.seed;
  spec.gamma = cli::parse_tuning_value(cfg.gamma, "gamma");
  spec.lambda = cli::parse_tuning_value(cfg.lambda, "lambda");
  spec.cv_rule = cli::parse_cv_rule(cfg.cv_rule);
  spec.leverage_adjust = cfg.leverage_adjust;
  spec.workers = cfg.workers;
  std::vector<Eigen::Index> Js(cfg.J_values.begin(), cfg.J_values.end());
  const auto rows = run_power_vs_J(spec, Js);
  for (const auto& r : rows) std::cout << "J = " << r.J << "  rand1 " << r.rand1 << "  rand2 " << r.rand2 << '\n';
  const auto dir = cli::output_dir(cfg);
  std::filesystem::create_directories(dir);
  write_power_csv(rows, dir / "power_vs_J.csv");
  std::cerr << "wrote " << (dir / "power_vs_J.csv").string() << '\n';
  return 0;
}

// Covariates and the residual to analyse: the true residual of a simulated
// DGP, or the orthogonalized OLS residual of an input file.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> residual_source(const RunConfig& cfg, bool orthogonalize) {
  if (!cfg.input.empty()) {
    const Dataset ds = load_input(cfg);
    const FittedModel fm = fit_model(ds, cfg.model.empty() ? "ols" : cfg.model);
    return {ds.X, orthogonalize ? orthogonalize_residuals(fm) : fm.residuals};
  }
  require(cfg.dgps.size() == 1, cfg.command + " takes --input or exactly one --dgp");
  const SimulatedSample s = generate(dgp_spec(cfg, cfg.dgps.front()));
  const FittedModel fm = fit_ols(s.data.X, s.data.Y);
  return {s.data.X, orthogonalize ? orthogonalize_residuals(fm) : fm.residuals};
}

TuneResult run_tuning(const RunConfig& cfg, const Eigen::MatrixXd& X, const Eigen::MatrixXd& eps) {
  TuneGrid grid = default_grid(X, split_seed(cfg.seed, streams::folds));
  if (auto g = cli::parse_tuning_value(cfg.gamma, "gamma")) grid.gamma_grid = {*g};
  if (auto l = cli::parse_tuning_value(cfg.lambda, "lambda")) grid.lambda_grid = {*l};
  grid.rule = cli::parse_cv_rule(cfg.cv_rule);
  return tune(X, eps, grid);
}

int cmd_tune(const RunConfig& cfg) {
  const auto [X, eps] = residual_source(cfg, false);
  const TuneResult r = run_tuning(cfg, X, eps);
  std::cout.precision(17);
  std::cout << "gamma " << r.gamma << "\nlambda " << r.lambda << "\ncv_score " << r.cv_score << '\n';
  const auto dir = cli::output_dir(cfg);
  std::filesystem::create_directories(dir);
  write_cv_table_csv(r, dir / "cv_table.csv");
  std::cerr << "wrote " << (dir / "cv_table.csv").string() << '\n';
  return 0;
}

int cmd_witness(const RunConfig& cfg) {
  const auto [X, eps] = residual_source(cfg, true);
  require(X.cols() == 2, "witness grid export needs d = 2 covariates");
  const TuneResult r = run_tuning(cfg, X, eps);
  const KernelContext ctx = KernelContext::build(X, KernelConfig::gaussian(r.gamma), r.lambda);
  const WitnessField field = compute_witness_field(eps, ctx, diagnostic_grid(X, cfg.resolution));
  const auto dir = cli::output_dir(cfg);
  std::filesystem::create_directories(dir);
  witness_grid_export(field, dir / "witness.csv");
  std::cout << "gamma " << r.gamma << ", lambda " << r.lambda << ", mean |w| "
            << field.values.cwiseAbs().mean() << '\n';
  std::cerr << "wrote " << (dir / "witness.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel ridge regression specification tests"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cli_values;
  std::string config_path;
  long d_flag = 0;
  app.add_option("--config", config_path, "JSON config; flags override its values");
  auto* o_input = app.add_option("--input", cli_values.input, "CSV file with a header row");
  auto* o_y = app.add_option("--y-col", cli_values.y_col, "Outcome column");
  auto* o_t = app.add_option("--t-col", cli_values.t_col, "Binary treatment column");
  auto* o_x = app.add_option("--x-cols", cli_values.x_cols, "Covariate columns (default: all others)")->delimiter(',');
  auto* o_model = app.add_option("--model", cli_values.model, "ols, probit or probit_cate_joint");
  auto* o_pre = app.add_option("--preprocess", cli_values.preprocess, "nsw");
  auto* o_stat = app.add_option("--statistic", cli_values.statistics,
                                "proj1, proj2, rand1, rand2, gp, kcm, icm (comma-separated)")->delimiter(',');
  auto* o_B = app.add_option("--B", cli_values.B, "Bootstrap replicates");
  auto* o_J = app.add_option("--J", cli_values.J, "Random locations");
  auto* o_level = app.add_option("--level", cli_values.level, "Test level");
  auto* o_seed = app.add_option("--seed", cli_values.seed, "Master seed");
  auto* o_gamma = app.add_option("--gamma", cli_values.gamma, "cv or a fixed kernel parameter");
  auto* o_lambda = app.add_option("--lambda", cli_values.lambda, "cv or a fixed ridge parameter");
  auto* o_gp = app.add_option("--gp-gamma", cli_values.gp_gamma, "median or a fixed gp kernel parameter");
  auto* o_rule = app.add_option("--cv-rule", cli_values.cv_rule, "min or one-se");
  auto* o_mult = app.add_option("--multipliers", cli_values.multipliers, "mammen or rademacher");
  auto* o_lev = app.add_flag("--leverage-adjust", cli_values.leverage_adjust,
                             "Rescale residuals by 1/sqrt(1 - leverage) before the bootstrap");
  auto* o_workers = app.add_option("--workers", cli_values.workers, "Worker threads (0: all cores)");
  auto* o_out = app.add_option("--out", cli_values.out, "Output directory (default $KCHECK_OUTPUT_DIR)");
  auto* o_dgp = app.add_option("--dgp", cli_values.dgps, "Simulation design(s)")->delimiter(',');
  auto* o_n = app.add_option("--n", cli_values.n, "Simulated sample size");
  auto* o_d = app.add_option("--d", d_flag, "Simulated covariate dimension");
  auto* o_R = app.add_option("--R", cli_values.R, "Monte Carlo replications");
  auto* o_Jv = app.add_option("--J-values", cli_values.J_values, "J grid for power-vs-j")->delimiter(',');
  auto* o_res = app.add_option("--resolution", cli_values.resolution, "Witness grid points per axis");

  std::string command;
  const std::pair<const char*, const char*> subcommands[] = {
      {"test", "Fit the model to --input and run the requested tests"},
      {"simulate", "Monte Carlo rejection rates for one or more --dgp designs"},
      {"witness", "Export the fitted witness function on a 2-d grid"},
      {"tune", "Cross-validate (gamma, lambda) and export the CV table"},
      {"power-vs-j", "Power of rand1/rand2 across numbers of locations"},
  };
  for (const auto& [name, help] : subcommands) {
    app.add_subcommand(name, help)->callback([&command, name = name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cli::apply_config_file(cfg, config_path);
    const auto take = [](CLI::Option* o, auto& dst, const auto& src) {
      if (o->count() > 0) dst = src;
    };
    take(o_input, cfg.input, cli_values.input);
    take(o_y, cfg.y_col, cli_values.y_col);
    take(o_t, cfg.t_col, cli_values.t_col);
    take(o_x, cfg.x_cols, cli_values.x_cols);
    take(o_model, cfg.model, cli_values.model);
    take(o_pre, cfg.preprocess, cli_values.preprocess);
    take(o_stat, cfg.statistics, cli_values.statistics);
    take(o_B, cfg.B, cli_values.B);
    take(o_J, cfg.J, cli_values.J);
    take(o_level, cfg.level, cli_values.level);
    take(o_seed, cfg.seed, cli_values.seed);
    take(o_gamma, cfg.gamma, cli_values.gamma);
    take(o_lambda, cfg.lambda, cli_values.lambda);
    take(o_gp, cfg.gp_gamma, cli_values.gp_gamma);
    take(o_rule, cfg.cv_rule, cli_values.cv_rule);
    take(o_mult, cfg.multipliers, cli_values.multipliers);
    take(o_lev, cfg.leverage_adjust, cli_values.leverage_adjust);
    take(o_workers, cfg.workers, cli_values.workers);
    take(o_out, cfg.out, cli_values.out);
    take(o_dgp, cfg.dgps, cli_values.dgps);
    take(o_n, cfg.n, cli_values.n);
    if (o_d->count() > 0) cfg.d = d_flag;
    take(o_R, cfg.R, cli_values.R);
    take(o_Jv, cfg.J_values, cli_values.J_values);
    take(o_res, cfg.resolution, cli_values.resolution);
    cfg.command = command;

    if (command == "test") return cmd_test(cfg);
    if (command == "simulate") return cmd_simulate(cfg);
    if (command == "witness") return cmd_witness(cfg);
    if (command == "tune") return cmd_tune(cfg);
    return cmd_power_vs_j(cfg);
  } catch (const kcheck::NumericalError& e) {
    std::cerr << "kcheck: numerical error: " << e.what() << '\n';
    return 3;
  } catch (const kcheck::InputError& e) {
    std::cerr << "kcheck: input error: " << e.what() << '\n';
    return 2;
  } catch (const kcheck::IoError& e) {
    std::cerr << "kcheck: " << e.what() << '\n';
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "kcheck: " << e.what() << '\n';
    return 2;
  }
}
