#include "kcheck/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <string>

#include "kcheck/error.hpp"
#include "kcheck/kernels.hpp"
#include "kcheck/rng.hpp"

namespace kcheck {

void TuneGrid::validate() const {
  require(folds >= 2, "tuning: folds must be at least 2");
  require(!gamma_grid.empty() && !lambda_grid.empty(), "tuning: grids must be nonempty");
  require(std::is_sorted(gamma_grid.begin(), gamma_grid.end()) &&
              std::is_sorted(lambda_grid.begin(), lambda_grid.end()),
          "tuning: grids must be sorted ascending");
  for (double g : gamma_grid) require(g > 0.0, "tuning: gamma grid values must be positive");
  for (double l : lambda_grid) require(l > 0.0, "tuning: lambda grid values must be positive");
}

TuneGrid default_grid(const Eigen::Ref<const Eigen::MatrixXd>& X, std::uint64_t seed) {
  const double center = median_heuristic(X);
  TuneGrid grid;
  for (double f : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) grid.gamma_grid.push_back(center * f);
  grid.lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  grid.folds = 5;
  grid.seed = seed;
  return grid;
}

std::vector<int> fold_assignment(Eigen::Index n, int folds, std::uint64_t seed) {
  require(folds >= 2, "fold_assignment: folds must be at least 2");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  // Fisher-Yates with our own uniform draw so the permutation does not depend
  // on the standard library's shuffle implementation.
  for (std::size_t i = order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(order[i - 1], order[std::min(j, i - 1)]);
  }
  std::vector<int> label(static_cast<std::size_t>(n));
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    label[static_cast<std::size_t>(order[pos])] = static_cast<int>(pos % static_cast<std::size_t>(folds));
  }
  return label;
}

TuneResult tune_with_folds(const Eigen::Ref<const Eigen::MatrixXd>& X,
                           const Eigen::Ref<const Eigen::MatrixXd>& eps, const TuneGrid& grid,
                           const std::vector<int>& folds) {
  grid.validate();
  const Eigen::Index n = X.rows();
  require(eps.rows() == n, "tune: residual rows do not match covariate rows");
  require(n >= grid.folds, "tune: need at least as many observations as folds");
  require(static_cast<Eigen::Index>(folds.size()) == n, "tune: fold labels must cover every row");

  std::vector<std::vector<Eigen::Index>> train(static_cast<std::size_t>(grid.folds)),
      hold(static_cast<std::size_t>(grid.folds));
  for (Eigen::Index i = 0; i < n; ++i) {
    const int f = folds[static_cast<std::size_t>(i)];
    require(f >= 0 && f < grid.folds, "tune: fold label out of range");
    for (int g = 0; g < grid.folds; ++g) {
      (g == f ? hold : train)[static_cast<std::size_t>(g)].push_back(i);
    }
  }
  for (int f = 0; f < grid.folds; ++f) {
    if (hold[static_cast<std::size_t>(f)].size() < 2 || train[static_cast<std::size_t>(f)].size() < 2) {
      throw InputError("tune: fold " + std::to_string(f) + " has fewer than 2 observations");
    }
  }

  TuneResult result;
  const std::size_t n_cells = grid.gamma_grid.size() * grid.lambda_grid.size();
  std::vector<double> score(n_cells, 0.0);
  result.cv_table.reserve(n_cells * static_cast<std::size_t>(grid.folds));

  for (std::size_t gi = 0; gi < grid.gamma_grid.size(); ++gi) {
    const double gamma = grid.gamma_grid[gi];
    const Eigen::MatrixXd K = kernel_matrix(KernelConfig::gaussian(gamma), X);
    for (int f = 0; f < grid.folds; ++f) {
      const auto& tr = train[static_cast<std::size_t>(f)];
      const auto& ho = hold[static_cast<std::size_t>(f)];
      const auto nt = static_cast<Eigen::Index>(tr.size());
      const Eigen::MatrixXd K_tt = K(tr, tr);
      const Eigen::MatrixXd K_ht = K(ho, tr);
      const Eigen::MatrixXd eps_t = eps(tr, Eigen::all);
      const Eigen::MatrixXd eps_h = eps(ho, Eigen::all);
      for (std::size_t li = 0; li < grid.lambda_grid.size(); ++li) {
        const double lambda = grid.lambda_grid[li];
        Eigen::MatrixXd A = K_tt;
        A.diagonal().array() += static_cast<double>(nt) * lambda;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success) {
          throw NumericalError("tune: training kernel system not positive definite");
        }
        const Eigen::MatrixXd alpha = llt.solve(eps_t);
        const double sse = (eps_h - K_ht * alpha).squaredNorm();
        result.cv_table.push_back(
            CvCell{gamma, lambda, f, sse, static_cast<Eigen::Index>(ho.size())});
        score[gi * grid.lambda_grid.size() + li] += sse;
      }
    }
  }

  // Grid order: gamma ascending, lambda descending, so the first cell within
  // tolerance of the best already satisfies the tie-break.
  std::size_t best = n_cells;
  double best_score = 0.0;
  for (std::size_t gi = 0; gi < grid.gamma_grid.size(); ++gi) {
    for (std::size_t lr = grid.lambda_grid.size(); lr-- > 0;) {
      const std::size_t cell = gi * grid.lambda_grid.size() + lr;
      const double s = score[cell];
      if (best == n_cells) {
        best = cell;
        best_score = s;
        continue;
      }
      const double tol = 1e-12 * std::max(std::abs(s), std::abs(best_score));
      if (s < best_score - tol) {
        best = cell;
        best_score = s;
      } else if (std::abs(s - best_score) <= tol) {
        const double cur_lambda = grid.lambda_grid[best % grid.lambda_grid.size()];
        if (grid.lambda_grid[lr] > cur_lambda) {
          best = cell;
          best_score = s;
        }
      }
    }
  }
  if (grid.rule == CvRule::one_se) {
    const double K = static_cast<double>(grid.folds);
    double mean = 0.0;
    std::vector<double> fold_mse;
    for (const CvCell& c : result.cv_table) {
      if (c.gamma == grid.gamma_grid[best / grid.lambda_grid.size()] &&
          c.lambda == grid.lambda_grid[best % grid.lambda_grid.size()]) {
        fold_mse.push_back(c.sse / static_cast<double>(c.n_holdout));
        mean += fold_mse.back() / K;
      }
    }
    double var = 0.0;
    for (double m : fold_mse) var += (m - mean) * (m - mean) / (K - 1.0);
    const double limit = best_score + static_cast<double>(n) * std::sqrt(var / K);
    // Largest lambda first, then smallest gamma.
    bool found = false;
    for (std::size_t lr = grid.lambda_grid.size(); lr-- > 0 && !found;) {
      for (std::size_t gi = 0; gi < grid.gamma_grid.size(); ++gi) {
        const std::size_t cell = gi * grid.lambda_grid.size() + lr;
        if (score[cell] <= limit) {
          best = cell;
          best_score = score[cell];
          found = true;
          break;
        }
      }
    }
  }
  result.gamma = grid.gamma_grid[best / grid.lambda_grid.size()];
  result.lambda = grid.lambda_grid[best % grid.lambda_grid.size()];
  result.cv_score = best_score / static_cast<double>(n);
  return result;
}

TuneResult tune(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::MatrixXd>& eps,
                const TuneGrid& grid) {
  grid.validate();
  require(X.rows() >= grid.folds, "tune: need at least as many observations as folds");
  return tune_with_folds(X, eps, grid, fold_assignment(X.rows(), grid.folds, grid.seed));
}

void write_cv_table_csv(const TuneResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "gamma,lambda,fold,sse,n_holdout\n" << std::setprecision(17);
  for (const auto& c : result.cv_table) {
    out << c.gamma << ',' << c.lambda << ',' << c.fold << ',' << c.sse << ',' << c.n_holdout << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace kcheck
