#pragma once

#include <Eigen/Dense>
#include <random>

#include "qbath/bath.hpp"
#include "qbath/operator.hpp"

namespace qbath::testing {

inline Eigen::MatrixXcd random_complex(int d, std::mt19937& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cplx(dist(rng), dist(rng));
  return m;
}

inline Eigen::MatrixXcd random_hermitian(int d, std::mt19937& rng) {
  const Eigen::MatrixXcd m = random_complex(d, rng);
  return 0.5 * (m + m.adjoint());
}

inline Eigen::MatrixXcd random_density(int d, std::mt19937& rng) {
  const Eigen::MatrixXcd m = random_complex(d, rng);
  Eigen::MatrixXcd rho = m * m.adjoint();
  return rho / rho.trace();
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

inline Operator op2(const char* label, const Eigen::Matrix2cd& m) {
  return Operator(HilbertSpace::single(label, 2), m);
}

}  // namespace qbath::testing
