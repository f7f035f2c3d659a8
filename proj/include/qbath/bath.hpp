#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qbath/operator.hpp"
#include "qbath/superop.hpp"

namespace qbath {

enum class Axis : int { x = 0, y = 1, z = 2 };

inline char axis_char(Axis a) { return "xyz"[static_cast<int>(a)]; }
std::optional<Axis> axis_from_char(char c);

// Pauli matrices (2x2).
Eigen::Matrix2cd pauli(Axis a);
Eigen::Matrix2cd pauli_identity();

// One product of single-spin Paulis with a real coefficient; empty `ops`
// means the identity string.
struct PauliFactor {
  int spin = 0;
  Axis axis = Axis::z;
};

struct PauliTerm {
  double coeff = 0.0;
  std::vector<PauliFactor> ops;
};

// Spin-1/2 bath: Hamiltonian and the three noise-field operators B_x,y,z as
// real combinations of Pauli strings (Hermitian by construction).
struct BathSpec {
  int num_spins = 1;
  std::vector<PauliTerm> hamiltonian;
  std::array<std::vector<PauliTerm>, 3> field;  // indexed by Axis
};

struct ThermalParams {
  double beta = 0.0;  // inverse temperature; 0 = infinite temperature
};

// Central spin-1/2 coupling V = sum_alpha S_alpha (x) B_alpha with
// S_alpha = sigma_alpha/2 on the active axes, plus an optional static
// system Hamiltonian.
struct SystemSpec {
  std::array<bool, 3> coupling_axes{true, true, true};
  Eigen::Matrix2cd h_system = Eigen::Matrix2cd::Zero();
};

// Built bath: operators on the labeled bath space, with the Hamiltonian
// eigendecomposition cached for interaction-picture evolution.
class BathModel {
public:
  BathModel(HilbertSpace space, Operator h_bath, std::array<Operator, 3> field);

  const HilbertSpace& space() const { return space_; }
  const Operator& hamiltonian() const { return h_bath_; }
  const Operator& field_op(Axis a) const { return field_[static_cast<int>(a)]; }
  const HermitianEigen& eig() const { return eig_; }
  int dim() const { return space_.dim(); }

  // Interaction-picture field e^{iH_B t} B_alpha e^{-iH_B t}.
  Operator field_at(Axis a, double t) const;

  bool field_is_zero(Axis a, double tol = 1e-14) const;
  bool is_pure_dephasing(double tol = 1e-14) const;  // B_x = B_y = 0

private:
  HilbertSpace space_;
  Operator h_bath_;
  std::array<Operator, 3> field_;
  HermitianEigen eig_;
  std::array<Eigen::MatrixXcd, 3> field_eig_;  // fields in the H_B eigenbasis
};

// Realizes a BathSpec as dense operators on the bath space (labels "b0",
// "b1", ...). Throws config_error on malformed Pauli strings.
BathModel build_bath(const BathSpec& spec);

// e^{-beta H}/Z.
Operator thermal_state(const Operator& h_bath, const ThermalParams& params);
Operator thermal_state(const BathModel& bath, const ThermalParams& params);

// Interaction-picture bath field; same as bath.field_at.
Operator bath_field_at(const BathModel& bath, Axis a, double t);

// Fixed model presets used as citable test beds.
//
// P1: one spin, H_B = (omega/2) sz, B_z = g sx (pure dephasing with
//     nontrivial bath dynamics).
// P2: same space with all of B_x = g sx, B_y = g sy, B_z = g sz nonzero
//     (general coupling).
// P3: three spins with pairwise Ising couplings, transverse + longitudinal
//     local fields, B_z = g (sz0 + 0.8 sz1 + 1.2 sz2); pure dephasing,
//     non-Gaussian (correlated-cluster target).
// P1 tilted: P1 with H_B = (omega/2)(sz + tilt*sx). The tilt breaks the
//     sz-parity of P1, which otherwise forces every odd-order correlation
//     to vanish; use it whenever a nonzero third-order signal is needed.
BathSpec preset_p1(double omega = 1.0, double g = 1.0);
BathSpec preset_p2(double omega = 1.0, double g = 1.0);
BathSpec preset_p3(double j = 0.4, double g = 1.0);
BathSpec preset_p1_tilted(double omega = 1.0, double g = 1.0, double tilt = 0.7);

// Named preset lookup for config files: "P1", "P2", "P3", "P1T".
BathSpec preset_by_name(const std::string& name, double omega, double g, double j);

}  // namespace qbath
