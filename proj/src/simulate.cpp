#include "kcheck/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <string>
#include <utility>

#include "kcheck/bootstrap.hpp"
#include "kcheck/error.hpp"
#include "kcheck/models.hpp"
#include "kcheck/parallel.hpp"
#include "kcheck/rng.hpp"

namespace kcheck {

namespace {

constexpr std::array<std::pair<DgpId, std::string_view>, 12> kDgpNames{{
    {DgpId::dgp0, "dgp0"},
    {DgpId::dgp1, "dgp1"},
    {DgpId::dgp2, "dgp2"},
    {DgpId::dgp3, "dgp3"},
    {DgpId::dgp4, "dgp4"},
    {DgpId::dgp5, "dgp5"},
    {DgpId::dgp6, "dgp6"},
    {DgpId::dgp5_star, "dgp5_star"},
    {DgpId::dgp6_star, "dgp6_star"},
    {DgpId::fig1_dgp0, "fig1_dgp0"},
    {DgpId::fig1_dgp1, "fig1_dgp1"},
    {DgpId::fig1_dgp2, "fig1_dgp2"},
}};

bool is_fig1(DgpId id) {
  return id == DgpId::fig1_dgp0 || id == DgpId::fig1_dgp1 || id == DgpId::fig1_dgp2;
}

// Uniform blocks on [0, upper(l)] for the first d/2 columns, centred normals
// with sd 1 + 0.1 (l - d/2) for the rest (l counted from 1).
Eigen::MatrixXd mixed_covariates(Eigen::Index n, Eigen::Index d, bool wide_uniform, Rng& rng) {
  const Eigen::Index half = d / 2;
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < d; ++c) {
      const double l = static_cast<double>(c + 1);
      if (c < half) {
        const double upper = wide_uniform ? l : 1.0 + 0.1 * (l - 1.0);
        X(i, c) = upper * uniform01(rng);
      } else {
        X(i, c) = (1.0 + 0.1 * (l - static_cast<double>(half))) * normal(rng);
      }
    }
  }
  return X;
}

Eigen::VectorXd draw_errors(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) e(i) = normal(rng);
  return e;
}

Eigen::MatrixXd normal_covariates(Eigen::Index n, Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < d; ++c) X(i, c) = normal(rng);
  return X;
}

}  // namespace

std::string_view to_string(DgpId id) {
  for (const auto& [key, name] : kDgpNames) {
    if (key == id) return name;
  }
  return "unknown";
}

DgpId parse_dgp_id(std::string_view text) {
  for (const auto& [key, name] : kDgpNames) {
    if (name == text) return key;
  }
  throw InputError("unknown DGP '" + std::string(text) + "'");
}

void DgpSpec::validate() const {
  require(n >= 2, "DGP sample size must be at least 2");
  require(d >= 1, "DGP dimension must be at least 1");
  const std::string name(to_string(id));
  switch (id) {
    case DgpId::dgp5:
    case DgpId::dgp6:
      require(d == 10, name + " requires d = 10, got d = " + std::to_string(d));
      break;
    case DgpId::dgp5_star:
    case DgpId::dgp6_star:
      require(d == 20, name + " requires d = 20, got d = " + std::to_string(d));
      break;
    case DgpId::fig1_dgp0:
    case DgpId::fig1_dgp1:
    case DgpId::fig1_dgp2:
      require(d == 2, name + " requires d = 2, got d = " + std::to_string(d));
      break;
    default:
      break;
  }
}

SimulatedSample generate(const DgpSpec& spec, double noise_scale) {
  spec.validate();
  Rng rng = make_rng(spec.seed, streams::data);
  const Eigen::Index n = spec.n;
  const Eigen::Index d = spec.d;

  Eigen::MatrixXd X;
  switch (spec.id) {
    case DgpId::dgp5:
    case DgpId::dgp5_star:
      X = mixed_covariates(n, d, false, rng);
      break;
    case DgpId::dgp6:
    case DgpId::dgp6_star:
      X = mixed_covariates(n, d, true, rng);
      break;
    default:
      X = normal_covariates(n, d, rng);
      break;
  }
  const Eigen::VectorXd e = noise_scale * draw_errors(n, rng);

  const bool ones_beta = is_fig1(spec.id) || spec.id == DgpId::dgp5 || spec.id == DgpId::dgp5_star ||
                         spec.id == DgpId::dgp6 || spec.id == DgpId::dgp6_star;
  const double intercept = is_fig1(spec.id) ? 0.0 : 1.0;
  const Eigen::VectorXd xb = X.rowwise().sum() * (ones_beta ? 1.0 : 0.5);
  const Eigen::VectorXd norm = X.rowwise().norm();

  Eigen::VectorXd dev(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = xb(i);
    switch (spec.id) {
      case DgpId::dgp0:
      case DgpId::fig1_dgp0:
        dev(i) = e(i);
        break;
      case DgpId::dgp1:
        dev(i) = 1.5 * std::exp(-t * t) + e(i);
        break;
      case DgpId::dgp2:
        dev(i) = 2.0 * std::cos(1.2 * norm(i)) + e(i);
        break;
      case DgpId::dgp3:
        dev(i) = 0.5 * t * t + e(i);
        break;
      case DgpId::dgp4:
        dev(i) = 1.5 * std::exp(0.25 * t) + e(i);
        break;
      case DgpId::dgp5:
      case DgpId::dgp5_star:
        dev(i) = norm(i) + std::abs(X.row(i).sum()) * e(i);
        break;
      case DgpId::dgp6:
      case DgpId::dgp6_star: {
        const double lin = X.row(i).head(5).sum();
        const double sq = X.row(i).segment(5, d - 5).squaredNorm();
        dev(i) = norm(i) / std::sqrt(static_cast<double>(n)) + std::sqrt(0.1 + lin + sq) * e(i);
        break;
      }
      case DgpId::fig1_dgp1:
        dev(i) = 4.5 * t * t + e(i);
        break;
      case DgpId::fig1_dgp2:
        dev(i) = 4.5 * std::exp(-t * t) + e(i);
        break;
    }
  }

  SimulatedSample out;
  out.data.X = std::move(X);
  out.data.Y = intercept + xb.array() + dev.array();
  out.data.covariate_names.reserve(static_cast<std::size_t>(d));
  for (Eigen::Index c = 0; c < d; ++c) out.data.covariate_names.push_back("x" + std::to_string(c + 1));
  out.true_residual = std::move(dev);
  return out;
}

void ExperimentSpec::validate() const {
  dgp.validate();
  require(!statistics.empty(), "experiment needs at least one statistic");
  require(R >= 1, "R must be at least 1");
  require(B >= 1, "B must be at least 1");
  require(J >= 1, "J must be at least 1");
  require(level > 0.0 && level < 1.0, "level must lie in (0, 1)");
}

double CellResult::rejection_rate(StatName name, double level) const {
  for (std::size_t s = 0; s < spec.statistics.size(); ++s) {
    if (spec.statistics[s] != name) continue;
    const Eigen::VectorXd& p = p_values[s];
    return static_cast<double>((p.array() <= level).count()) / static_cast<double>(p.size());
  }
  throw InputError("statistic " + std::string(to_string(name)) + " not in this cell");
}

double CellResult::mc_se(StatName name, double level) const {
  const double p = rejection_rate(name, level);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(spec.R));
}

CellResult run_cell(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<StatName> multiplier_stats;
  bool with_icm = false;
  for (StatName s : spec.statistics) {
    if (s == StatName::icm) {
      with_icm = true;
    } else {
      multiplier_stats.push_back(s);
    }
  }

  const std::size_t S = spec.statistics.size();
  const auto R = static_cast<std::size_t>(spec.R);
  std::vector<std::vector<double>> by_rep(R, std::vector<double>(S, 1.0));

  parallel_for(R, spec.workers, [&](std::size_t r) {
    const std::uint64_t rep_seed = split_seed(spec.seed, r);
    DgpSpec dgp = spec.dgp;
    dgp.seed = rep_seed;
    const SimulatedSample sample = generate(dgp);
    const FittedModel fm = fit_ols(sample.data.X, sample.data.Y);

    std::optional<TestSuiteResult> suite;
    if (!multiplier_stats.empty()) {
      TestOptions opt;
      opt.statistics = multiplier_stats;
      opt.B = spec.B;
      opt.J = spec.J;
      opt.seed = rep_seed;
      opt.gamma = spec.gamma;
      opt.lambda = spec.lambda;
      opt.cv_rule = spec.cv_rule;
      opt.leverage_adjust = spec.leverage_adjust;
      suite = run_tests(sample.data.X, fm, opt);
    }
    for (std::size_t s = 0; s < S; ++s) {
      const StatName name = spec.statistics[s];
      if (name == StatName::icm) continue;
      by_rep[r][s] = suite->report(name).p_value;
    }
    if (with_icm) {
      BootstrapPlan plan;
      plan.replicates = spec.B;
      plan.master_seed = split_seed(rep_seed, streams::benchmark);
      const TestReport icm = wild_bootstrap_icm(sample.data.X, sample.data.Y, plan, spec.icm_gamma);
      for (std::size_t s = 0; s < S; ++s) {
        if (spec.statistics[s] == StatName::icm) by_rep[r][s] = icm.p_value;
      }
    }
  });

  CellResult out;
  out.spec = spec;
  out.p_values.assign(S, Eigen::VectorXd(spec.R));
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t s = 0; s < S; ++s) out.p_values[s](static_cast<Eigen::Index>(r)) = by_rep[r][s];
  return out;
}

std::vector<PowerRow> run_power_vs_J(const ExperimentSpec& base, std::vector<Eigen::Index> J_values) {
  base.validate();
  require(!J_values.empty(), "power-vs-J needs at least one J");
  std::sort(J_values.begin(), J_values.end());
  J_values.erase(std::unique(J_values.begin(), J_values.end()), J_values.end());
  for (Eigen::Index J : J_values) require(J >= 1 && J <= 15, "J values must lie in [1, 15]");

  const std::size_t nJ = J_values.size();
  const auto R = static_cast<std::size_t>(base.R);
  // p[r][j] = {rand1, rand2}
  std::vector<std::vector<std::array<double, 2>>> p(R, std::vector<std::array<double, 2>>(nJ));

  parallel_for(R, base.workers, [&](std::size_t r) {
    const std::uint64_t rep_seed = split_seed(base.seed, r);
    DgpSpec dgp = base.dgp;
    dgp.seed = rep_seed;
    const SimulatedSample sample = generate(dgp);
    const FittedModel fm = fit_ols(sample.data.X, sample.data.Y);

    TestOptions opt;
    opt.statistics = {StatName::rand1, StatName::rand2};
    opt.B = base.B;
    opt.seed = rep_seed;
    opt.gamma = base.gamma;
    opt.lambda = base.lambda;
    opt.cv_rule = base.cv_rule;
    opt.leverage_adjust = base.leverage_adjust;
    for (std::size_t j = 0; j < nJ; ++j) {
      opt.J = J_values[j];
      const TestSuiteResult suite = run_tests(sample.data.X, fm, opt);
      p[r][j] = {suite.report(StatName::rand1).p_value, suite.report(StatName::rand2).p_value};
      opt.gamma = suite.tuning.gamma;
      opt.lambda = suite.tuning.lambda;
    }
  });

  std::vector<PowerRow> rows;
  const double Rd = static_cast<double>(R);
  for (std::size_t j = 0; j < nJ; ++j) {
    std::array<double, 2> rate{0.0, 0.0};
    for (std::size_t r = 0; r < R; ++r)
      for (int k = 0; k < 2; ++k) rate[k] += p[r][j][k] <= base.level ? 1.0 : 0.0;
    PowerRow row;
    row.J = J_values[j];
    row.rand1 = rate[0] / Rd;
    row.rand2 = rate[1] / Rd;
    row.rand1_se = std::sqrt(row.rand1 * (1.0 - row.rand1) / Rd);
    row.rand2_se = std::sqrt(row.rand2 * (1.0 - row.rand2) / Rd);
    row.R = base.R;
    rows.push_back(row);
  }
  return rows;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace

void write_cells_csv(const std::vector<CellResult>& cells, const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  out << "dgp,n,d,statistic,level,rejection_rate,mc_se,R,B,J\n";
  for (const CellResult& cell : cells) {
    const ExperimentSpec& s = cell.spec;
    for (StatName name : s.statistics) {
      out << to_string(s.dgp.id) << ',' << s.dgp.n << ',' << s.dgp.d << ',' << to_string(name) << ','
          << s.level << ',' << cell.rejection_rate(name) << ',' << cell.mc_se(name) << ',' << s.R << ','
          << s.B << ',' << s.J << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_power_csv(const std::vector<PowerRow>& rows, const std::filesystem::path& path) {
  std::ofstream out = open_csv(path);
  out << "J,rand1,rand1_se,rand2,rand2_se,R\n";
  for (const PowerRow& row : rows) {
    out << row.J << ',' << row.rand1 << ',' << row.rand1_se << ',' << row.rand2 << ',' << row.rand2_se
        << ',' << row.R << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace kcheck
