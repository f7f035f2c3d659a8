#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qbath/common.hpp"
#include "qbath/hilbert.hpp"

namespace qbath {

// Dense complex operator on a labeled tensor-product space. The universal
// carrier for states, observables and noise fields; value semantics, no
// shared mutable state.
class Operator {
public:
  Operator() = default;  // scalar space, 1x1 zero
  Operator(HilbertSpace space, Eigen::MatrixXcd entries);

  static Operator zero(const HilbertSpace& space);
  static Operator identity(const HilbertSpace& space);

  const HilbertSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return mat_; }
  Eigen::MatrixXcd& matrix() { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

  cplx trace() const { return mat_.trace(); }
  Operator adjoint() const { return Operator(space_, mat_.adjoint()); }

  // Max entrywise |A - A^dagger|.
  double hermiticity_residue() const;
  bool is_hermitian(double tol = kDefaultTol) const { return hermiticity_residue() <= tol; }

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, Operator a) {
    a.mat_ *= s;
    return a;
  }
  friend Operator operator*(Operator a, cplx s) { return s * std::move(a); }

private:
  HilbertSpace space_;
  Eigen::MatrixXcd mat_ = Eigen::MatrixXcd::Zero(1, 1);
};

// Kronecker product on the concatenated space (left factor slowest index).
Operator tensor(const Operator& a, const Operator& b);

// Trace out every factor not in `keep`; kept factors retain their original
// relative order. Total trace is preserved.
Operator partial_trace(const Operator& a, const std::vector<std::string>& keep);

// Checks that a and b live on the same space (throws config_error).
void require_same_space(const Operator& a, const Operator& b, const char* what);

}  // namespace qbath
