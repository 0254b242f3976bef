#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kcheck/analysis.hpp"
#include "kcheck/dataset.hpp"
#include "kcheck/stats.hpp"

namespace kcheck {

enum class DgpId {
  dgp0, dgp1, dgp2, dgp3, dgp4, dgp5, dgp6, dgp5_star, dgp6_star,
  fig1_dgp0, fig1_dgp1, fig1_dgp2
};

std::string_view to_string(DgpId id);
DgpId parse_dgp_id(std::string_view text);

struct DgpSpec {
  DgpId id = DgpId::dgp0;
  Eigen::Index n = 200;
  Eigen::Index d = 10;
  std::uint64_t seed = 0;

  /// dgp5/dgp6 need d = 10, the starred variants d = 20, fig1_* d = 2.
  void validate() const;
};

struct SimulatedSample {
  Dataset data;
  /// Y minus the null mean: e for the nulls, deviation + noise otherwise.
  Eigen::VectorXd true_residual;
};

/// Draws one sample. `noise_scale` multiplies the error e; 0 gives the
/// noiseless mean function.
SimulatedSample generate(const DgpSpec& spec, double noise_scale = 1.0);

/// One Monte Carlo cell. Replication r uses seed split_seed(seed, r) for its
/// data, folds, locations and bootstrap substreams.
struct ExperimentSpec {
  DgpSpec dgp;
  std::vector<StatName> statistics{StatName::proj1, StatName::proj2, StatName::rand1,
                                   StatName::rand2};
  Eigen::Index R = 200;
  Eigen::Index B = 199;
  Eigen::Index J = 3;
  double level = 0.05;
  std::uint64_t seed = 0;
  /// Fixed KRR parameters; unset means cross-validated in every replication.
  std::optional<double> gamma;
  std::optional<double> lambda;
  CvRule cv_rule = CvRule::one_se;
  bool leverage_adjust = false;
  double icm_gamma = 0.5;
  unsigned workers = 1;

  void validate() const;
};

struct CellResult {
  ExperimentSpec spec;
  /// p_values[s][r]: statistic spec.statistics[s] in replication r.
  std::vector<Eigen::VectorXd> p_values;

  double rejection_rate(StatName name, double level) const;
  double rejection_rate(StatName name) const { return rejection_rate(name, spec.level); }
  /// sqrt(p (1 - p) / R).
  double mc_se(StatName name, double level) const;
  double mc_se(StatName name) const { return mc_se(name, spec.level); }
};

/// Replications run concurrently on spec.workers threads; the result does
/// not depend on the worker count.
CellResult run_cell(const ExperimentSpec& spec);

struct PowerRow {
  Eigen::Index J = 0;
  double rand1 = 0.0;
  double rand1_se = 0.0;
  double rand2 = 0.0;
  double rand2_se = 0.0;
  Eigen::Index R = 0;
};

/// Power of rand1/rand2 as a function of J on shared samples and tuning;
/// rows sorted by J. J values must lie in [1, 15].
std::vector<PowerRow> run_power_vs_J(const ExperimentSpec& base, std::vector<Eigen::Index> J_values);

/// Long format: dgp,n,d,statistic,level,rejection_rate,mc_se,R,B,J.
void write_cells_csv(const std::vector<CellResult>& cells, const std::filesystem::path& path);
/// J,rand1,rand1_se,rand2,rand2_se,R.
void write_power_csv(const std::vector<PowerRow>& rows, const std::filesystem::path& path);

}  // namespace kcheck
