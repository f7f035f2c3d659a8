#include "qbath/superop.hpp"

#include <Eigen/Eigenvalues>

namespace qbath {

Operator super_apply(SuperSign sign, const Operator& a, const Operator& x) {
  require_same_space(a, x, "super_apply");
  const auto& A = a.matrix();
  const auto& X = x.matrix();
  if (sign == SuperSign::plus) return Operator(a.space(), 0.5 * (A * X + X * A));
  return Operator(a.space(), cplx(0.0, -0.5) * (A * X - X * A));
}

HermitianEigen::HermitianEigen(const Operator& h, double herm_tol) : space_(h.space()) {
  if (h.hermiticity_residue() > herm_tol)
    throw config_error("HermitianEigen: operator is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix());
  if (es.info() != Eigen::Success)
    throw numeric_error("HermitianEigen: eigendecomposition failed");
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

Operator HermitianEigen::exp_scaled(cplx z) const {
  Eigen::VectorXcd w(evals_.size());
  for (Eigen::Index i = 0; i < evals_.size(); ++i) w(i) = std::exp(z * evals_(i));
  return Operator(space_, evecs_ * w.asDiagonal() * evecs_.adjoint());
}

Eigen::MatrixXcd HermitianEigen::to_eigenbasis(const Operator& a) const {
  if (a.space() != space_) throw config_error("HermitianEigen: operator on a different space");
  return evecs_.adjoint() * a.matrix() * evecs_;
}

Operator HermitianEigen::conjugate_in_basis(const Eigen::MatrixXcd& a_eig, double t) const {
  const Eigen::Index d = evals_.size();
  Eigen::VectorXcd phase(d);
  for (Eigen::Index i = 0; i < d; ++i) phase(i) = std::exp(cplx(0.0, evals_(i) * t));
  // e^{iHt} A e^{-iHt} in the eigenbasis: A_ij -> e^{i(l_i - l_j)t} A_ij.
  Eigen::MatrixXcd m = phase.asDiagonal() * a_eig * phase.conjugate().asDiagonal();
  return Operator(space_, evecs_ * m * evecs_.adjoint());
}

Operator HermitianEigen::conjugate(const Operator& a, double t) const {
  return conjugate_in_basis(to_eigenbasis(a), t);
}

Operator evolve(const Operator& a, const Operator& h, double t) {
  require_same_space(a, h, "evolve");
  return HermitianEigen(h).conjugate(a, t);
}

Operator expm_hermitian_scaled(const Operator& h, cplx z) {
  return HermitianEigen(h).exp_scaled(z);
}

}  // namespace qbath
