#pragma once

#include <Eigen/Dense>

#include "qbath/operator.hpp"

namespace qbath {

// Sign label of the +/- superoperators: A^- X = -i(AX - XA)/2 (commutator),
// A^+ X = (AX + XA)/2 (anticommutator).
enum class SuperSign { plus, minus };

inline SuperSign bar(SuperSign s) { return s == SuperSign::plus ? SuperSign::minus : SuperSign::plus; }
inline char sign_char(SuperSign s) { return s == SuperSign::plus ? '+' : '-'; }

Operator super_apply(SuperSign sign, const Operator& a, const Operator& x);

// Cached eigendecomposition of a Hermitian operator; backs every matrix
// exponential and unitary conjugation in the project.
class HermitianEigen {
public:
  explicit HermitianEigen(const Operator& h, double herm_tol = kDefaultTol);

  const HilbertSpace& space() const { return space_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }

  // V f(lambda) V^dagger for f(lambda) = exp(z*lambda).
  Operator exp_scaled(cplx z) const;

  // e^{-iHt}.
  Operator unitary(double t) const { return exp_scaled(cplx(0.0, -t)); }

  // Interaction-picture conjugation e^{iHt} A e^{-iHt}.
  Operator conjugate(const Operator& a, double t) const;

  // Same, with A already transformed into the eigenbasis (V^dagger A V);
  // saves two transforms when many times are needed for one operator.
  Eigen::MatrixXcd to_eigenbasis(const Operator& a) const;
  Operator conjugate_in_basis(const Eigen::MatrixXcd& a_eig, double t) const;

private:
  HilbertSpace space_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
};

// e^{iHt} A e^{-iHt} by eigendecomposition of Hermitian H.
Operator evolve(const Operator& a, const Operator& h, double t);

// V e^{z lambda} V^dagger (thermal weights, unitaries).
Operator expm_hermitian_scaled(const Operator& h, cplx z);

}  // namespace qbath
