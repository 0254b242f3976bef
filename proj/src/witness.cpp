#include "kcheck/witness.hpp"

#include <fstream>
#include <iomanip>
#include <string>

#include "kcheck/error.hpp"

namespace kcheck {

Eigen::MatrixXd krr_alpha(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx) {
  if (eps.rows() != ctx.n()) {
    throw InputError("krr_alpha: residual rows " + std::to_string(eps.rows()) +
                     " do not match kernel size " + std::to_string(ctx.n()));
  }
  return ctx.factor().solve(eps);
}

Eigen::MatrixXd witness_eval(const Eigen::Ref<const Eigen::MatrixXd>& alpha,
                             const Eigen::Ref<const Eigen::MatrixXd>& train_X, const KernelConfig& cfg,
                             const Eigen::Ref<const Eigen::MatrixXd>& points) {
  require(alpha.rows() == train_X.rows(), "witness_eval: alpha rows must match training rows");
  return kernel_cross(cfg, points, train_X) * alpha;
}

Eigen::MatrixXd diagnostic_grid(const Eigen::Ref<const Eigen::MatrixXd>& X, Eigen::Index resolution,
                                double expand) {
  require(X.cols() == 2, "diagnostic_grid: heatmap grids need exactly 2 covariates");
  require(X.rows() >= 1 && resolution >= 2, "diagnostic_grid: need data and resolution >= 2");
  const Eigen::RowVector2d lo = X.colwise().minCoeff();
  const Eigen::RowVector2d hi = X.colwise().maxCoeff();
  const Eigen::RowVector2d pad = expand * (hi - lo);
  const Eigen::RowVector2d a = lo - pad;
  const Eigen::RowVector2d b = hi + pad;
  Eigen::MatrixXd grid(resolution * resolution, 2);
  const double steps = static_cast<double>(resolution - 1);
  for (Eigen::Index i = 0; i < resolution; ++i) {
    for (Eigen::Index j = 0; j < resolution; ++j) {
      grid(i * resolution + j, 0) = a(0) + (b(0) - a(0)) * static_cast<double>(i) / steps;
      grid(i * resolution + j, 1) = a(1) + (b(1) - a(1)) * static_cast<double>(j) / steps;
    }
  }
  return grid;
}

WitnessField compute_witness_field(const Eigen::Ref<const Eigen::MatrixXd>& eps, const KernelContext& ctx,
                                   const Eigen::Ref<const Eigen::MatrixXd>& grid) {
  WitnessField field;
  field.train_X = ctx.X();
  field.alpha = krr_alpha(eps, ctx);
  field.gamma = ctx.kernel().gamma;
  field.lambda = ctx.lambda();
  field.grid = grid;
  field.values = witness_eval(field.alpha, field.train_X, ctx.kernel(), grid);
  return field;
}

void witness_grid_export(const WitnessField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const Eigen::Index d = field.grid.cols();
  const Eigen::Index q = field.values.cols();
  for (Eigen::Index c = 0; c < d; ++c) out << (c ? "," : "") << 'x' << (c + 1);
  for (Eigen::Index r = 0; r < q; ++r) out << ",w_" << (r + 1);
  out << '\n' << std::setprecision(17);
  for (Eigen::Index t = 0; t < field.grid.rows(); ++t) {
    for (Eigen::Index c = 0; c < d; ++c) out << (c ? "," : "") << field.grid(t, c);
    for (Eigen::Index r = 0; r < q; ++r) out << ',' << field.values(t, r);
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace kcheck
