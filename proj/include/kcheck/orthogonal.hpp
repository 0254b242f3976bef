#pragma once

#include <vector>

#include <Eigen/Dense>

#include "kcheck/models.hpp"

namespace kcheck {

/// Applies I - G (G'G)^{-1} G' without forming the n x n matrix.
///
/// G is factored once by column-pivoted Householder QR. Columns whose pivot
/// falls below 1e-10 * (largest pivot) are treated as dependent, so the
/// projector removes exactly the column space G spans numerically. The thin
/// orthonormal basis Q1 (n x rank) is kept and v is mapped to v - Q1 Q1' v.
class Projector {
 public:
  explicit Projector(const Eigen::Ref<const Eigen::MatrixXd>& basis);

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;
  /// Column-wise application.
  Eigen::MatrixXd apply_columns(const Eigen::Ref<const Eigen::MatrixXd>& M) const;

  /// Diagonal of the projector, 1 - h_kk with h_kk the leverage of row k.
  Eigen::VectorXd diagonal() const;

  Eigen::Index rank() const { return q_.cols(); }
  Eigen::Index size() const { return q_.rows(); }

 private:
  Eigen::MatrixXd q_;
};

inline Projector build_projector(const Eigen::Ref<const Eigen::MatrixXd>& G) { return Projector(G); }

/// One projector per residual component, each from that component's scores.
std::vector<Projector> build_projectors(const FittedModel& fm);

/// Column r of the result is Pi_r eps_r.
Eigen::MatrixXd orthogonalize_residuals(const FittedModel& fm);

/// Same as above with prebuilt projectors and an arbitrary residual matrix.
Eigen::MatrixXd orthogonalize(const std::vector<Projector>& projectors,
                              const Eigen::Ref<const Eigen::MatrixXd>& residuals);

}  // namespace kcheck
