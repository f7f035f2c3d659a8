#include "qbath/bath.hpp"

#include <cmath>

namespace qbath {

std::optional<Axis> axis_from_char(char c) {
  switch (c) {
    case 'x': case 'X': return Axis::x;
    case 'y': case 'Y': return Axis::y;
    case 'z': case 'Z': return Axis::z;
    default: return std::nullopt;
  }
}

Eigen::Matrix2cd pauli(Axis a) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (a) {
    case Axis::x:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Axis::y:
      m(0, 1) = cplx(0.0, -1.0);
      m(1, 0) = cplx(0.0, 1.0);
      break;
    case Axis::z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

Eigen::Matrix2cd pauli_identity() { return Eigen::Matrix2cd::Identity(); }

namespace {

HilbertSpace bath_space(int num_spins) {
  std::vector<SpaceFactor> factors;
  factors.reserve(num_spins);
  for (int i = 0; i < num_spins; ++i) factors.push_back({"b" + std::to_string(i), 2});
  return HilbertSpace(std::move(factors));
}

Operator pauli_string(const HilbertSpace& space, const std::vector<PauliFactor>& ops,
                      int num_spins) {
  std::vector<std::optional<Axis>> per_spin(num_spins, std::nullopt);
  for (const auto& f : ops) {
    if (f.spin < 0 || f.spin >= num_spins)
      throw config_error("pauli string references spin " + std::to_string(f.spin) +
                         " outside the bath of " + std::to_string(num_spins) + " spins");
    if (per_spin[f.spin])
      throw config_error("pauli string references spin " + std::to_string(f.spin) + " twice");
    per_spin[f.spin] = f.axis;
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
  for (int s = 0; s < num_spins; ++s) {
    const Eigen::Matrix2cd factor = per_spin[s] ? pauli(*per_spin[s]) : pauli_identity();
    Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        next.block(i * 2, j * 2, 2, 2) = m(i, j) * factor;
    m = std::move(next);
  }
  return Operator(space, std::move(m));
}

Operator sum_terms(const HilbertSpace& space, const std::vector<PauliTerm>& terms,
                   int num_spins) {
  Operator acc = Operator::zero(space);
  for (const auto& t : terms) acc += cplx(t.coeff) * pauli_string(space, t.ops, num_spins);
  return acc;
}

}  // namespace

BathModel::BathModel(HilbertSpace space, Operator h_bath, std::array<Operator, 3> field)
    : space_(std::move(space)),
      h_bath_(std::move(h_bath)),
      field_(std::move(field)),
      eig_(h_bath_) {
  for (int a = 0; a < 3; ++a) {
    if (field_[a].hermiticity_residue() > kDefaultTol)
      throw config_error("BathModel: field operator is not Hermitian");
    field_eig_[a] = eig_.to_eigenbasis(field_[a]);
  }
}

Operator BathModel::field_at(Axis a, double t) const {
  return eig_.conjugate_in_basis(field_eig_[static_cast<int>(a)], t);
}

bool BathModel::field_is_zero(Axis a, double tol) const {
  return field_op(a).matrix().cwiseAbs().maxCoeff() <= tol;
}

bool BathModel::is_pure_dephasing(double tol) const {
  return field_is_zero(Axis::x, tol) && field_is_zero(Axis::y, tol);
}

BathModel build_bath(const BathSpec& spec) {
  if (spec.num_spins < 1) throw config_error("BathSpec: num_spins must be >= 1");
  HilbertSpace space = bath_space(spec.num_spins);
  Operator h = sum_terms(space, spec.hamiltonian, spec.num_spins);
  std::array<Operator, 3> field = {sum_terms(space, spec.field[0], spec.num_spins),
                                   sum_terms(space, spec.field[1], spec.num_spins),
                                   sum_terms(space, spec.field[2], spec.num_spins)};
  return BathModel(std::move(space), std::move(h), std::move(field));
}

Operator thermal_state(const Operator& h_bath, const ThermalParams& params) {
  if (params.beta < 0.0) throw config_error("ThermalParams: beta must be >= 0");
  HermitianEigen eig(h_bath);
  // Shift by the ground energy before exponentiating so large beta is safe.
  const double e0 = eig.eigenvalues().minCoeff();
  Eigen::VectorXd w(eig.eigenvalues().size());
  for (Eigen::Index i = 0; i < w.size(); ++i)
    w(i) = std::exp(-params.beta * (eig.eigenvalues()(i) - e0));
  const double z = w.sum();
  Eigen::MatrixXcd rho =
      eig.eigenvectors() * (w / z).asDiagonal() * eig.eigenvectors().adjoint();
  return Operator(h_bath.space(), std::move(rho));
}

Operator thermal_state(const BathModel& bath, const ThermalParams& params) {
  return thermal_state(bath.hamiltonian(), params);
}

Operator bath_field_at(const BathModel& bath, Axis a, double t) { return bath.field_at(a, t); }

BathSpec preset_p1(double omega, double g) {
  BathSpec spec;
  spec.num_spins = 1;
  spec.hamiltonian = {{0.5 * omega, {{0, Axis::z}}}};
  spec.field[static_cast<int>(Axis::z)] = {{g, {{0, Axis::x}}}};
  return spec;
}

BathSpec preset_p2(double omega, double g) {
  BathSpec spec;
  spec.num_spins = 1;
  spec.hamiltonian = {{0.5 * omega, {{0, Axis::z}}}};
  spec.field[static_cast<int>(Axis::x)] = {{g, {{0, Axis::x}}}};
  spec.field[static_cast<int>(Axis::y)] = {{g, {{0, Axis::y}}}};
  spec.field[static_cast<int>(Axis::z)] = {{g, {{0, Axis::z}}}};
  return spec;
}

BathSpec preset_p3(double j, double g) {
  BathSpec spec;
  spec.num_spins = 3;
  const double transverse[3] = {0.8, 1.0, 1.3};
  const double longitudinal[3] = {0.3, 0.5, 0.7};
  for (int s = 0; s < 3; ++s) {
    spec.hamiltonian.push_back({0.5 * transverse[s], {{s, Axis::x}}});
    spec.hamiltonian.push_back({0.5 * longitudinal[s], {{s, Axis::z}}});
  }
  spec.hamiltonian.push_back({j, {{0, Axis::z}, {1, Axis::z}}});
  spec.hamiltonian.push_back({j, {{1, Axis::z}, {2, Axis::z}}});
  spec.hamiltonian.push_back({j, {{0, Axis::z}, {2, Axis::z}}});
  const double weight[3] = {1.0, 0.8, 1.2};
  for (int s = 0; s < 3; ++s)
    spec.field[static_cast<int>(Axis::z)].push_back({g * weight[s], {{s, Axis::z}}});
  return spec;
}

BathSpec preset_p1_tilted(double omega, double g, double tilt) {
  BathSpec spec = preset_p1(omega, g);
  spec.hamiltonian.push_back({0.5 * omega * tilt, {{0, Axis::x}}});
  return spec;
}

BathSpec preset_by_name(const std::string& name, double omega, double g, double j) {
  if (name == "P1" || name == "p1") return preset_p1(omega, g);
  if (name == "P2" || name == "p2") return preset_p2(omega, g);
  if (name == "P3" || name == "p3") return preset_p3(j, g);
  if (name == "P1T" || name == "p1t") return preset_p1_tilted(omega, g);
  throw config_error("unknown preset '" + name + "' (expected P1, P2, P3 or P1T)");
}

}  // namespace qbath
