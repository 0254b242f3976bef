#pragma once

#include <filesystem>

#include <Eigen/Dense>

#include "kcheck/context.hpp"
#include "kcheck/kernels.hpp"

namespace kcheck {

/// The fitted KRR coefficient function evaluated on a set of points.
struct WitnessField {
  Eigen::MatrixXd train_X;
  Eigen::MatrixXd alpha;   // n x q
  double gamma = 0.0;
  double lambda = 0.0;
  Eigen::MatrixXd grid;    // m x d
  Eigen::MatrixXd values;  // m x q
};

/// alpha = (K + n lambda I)^{-1} eps, per residual column.
Eigen::MatrixXd krr_alpha(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx);

/// w(v_t) = sum_i alpha_i k(x_i, v_t) for every row v_t of `points`.
Eigen::MatrixXd witness_eval(const Eigen::Ref<const Eigen::MatrixXd>& alpha,
                             const Eigen::Ref<const Eigen::MatrixXd>& train_X, const KernelConfig& cfg,
                             const Eigen::Ref<const Eigen::MatrixXd>& points);

/// resolution x resolution grid over the bounding box of a 2-column X, each
/// side widened by `expand` times its range. Row-major: x1 varies slowest.
Eigen::MatrixXd diagnostic_grid(const Eigen::Ref<const Eigen::MatrixXd>& X, Eigen::Index resolution = 60,
                                double expand = 0.1);

WitnessField compute_witness_field(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx,
                                   const Eigen::Ref<const Eigen::MatrixXd>& grid);

/// CSV with header x1..xd,w_1..w_q and one row per grid point, 17 significant digits.
void witness_grid_export(const WitnessField& field, const std::filesystem::path& path);

}  // namespace kcheck
