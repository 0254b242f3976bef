#include "kcheck/orthogonal.hpp"

#include <string>

#include "kcheck/error.hpp"

namespace kcheck {

Projector::Projector(const Eigen::Ref<const Eigen::MatrixXd>& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index p = basis.cols();
  if (n <= p) {
    throw InputError("build_projector: need more rows than score columns (n=" + std::to_string(n) +
                     ", p=" + std::to_string(p) + ")");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = basis.isZero(0.0) ? 0 : qr.rank();
  q_ = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
}

Eigen::VectorXd Projector::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != size()) {
    throw InputError("projector: vector length " + std::to_string(v.size()) +
                     " does not match basis rows " + std::to_string(size()));
  }
  if (rank() == 0) return v;
  return v - q_ * (q_.transpose() * v);
}

Eigen::MatrixXd Projector::apply_columns(const Eigen::Ref<const Eigen::MatrixXd>& M) const {
  if (M.rows() != size()) {
    throw InputError("projector: matrix rows " + std::to_string(M.rows()) +
                     " do not match basis rows " + std::to_string(size()));
  }
  if (rank() == 0) return M;
  return M - q_ * (q_.transpose() * M);
}

Eigen::VectorXd Projector::diagonal() const {
  if (rank() == 0) return Eigen::VectorXd::Ones(size());
  return (1.0 - q_.rowwise().squaredNorm().array()).matrix();
}

std::vector<Projector> build_projectors(const FittedModel& fm) {
  fm.validate();
  std::vector<Projector> out;
  out.reserve(fm.scores.size());
  for (const auto& G : fm.scores) out.emplace_back(G);
  return out;
}

Eigen::MatrixXd orthogonalize(const std::vector<Projector>& projectors,
                              const Eigen::Ref<const Eigen::MatrixXd>& residuals) {
  require(static_cast<Eigen::Index>(projectors.size()) == residuals.cols(),
          "orthogonalize: one projector per residual column required");
  Eigen::MatrixXd out(residuals.rows(), residuals.cols());
  for (Eigen::Index r = 0; r < residuals.cols(); ++r) {
    out.col(r) = projectors[static_cast<std::size_t>(r)].apply(residuals.col(r));
  }
  return out;
}

Eigen::MatrixXd orthogonalize_residuals(const FittedModel& fm) {
  return orthogonalize(build_projectors(fm), fm.residuals);
}

}  // namespace kcheck
