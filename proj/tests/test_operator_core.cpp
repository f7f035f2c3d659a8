#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "qbath/operator.hpp"
#include "qbath/superop.hpp"
#include "test_helpers.hpp"

using namespace qbath;
using namespace qbath::testing;

namespace {

Operator sigma_op(const char* label, Axis a) { return op2(label, pauli(a)); }

}  // namespace

TEST_CASE("tensor: identity, traceless factors, explicit Kronecker") {
  const Operator i2 = Operator::identity(HilbertSpace::single("a", 2));
  const Operator i2b = Operator::identity(HilbertSpace::single("b", 2));
  const Operator i4 = tensor(i2, i2b);
  CHECK(i4.dim() == 4);
  CHECK(max_abs(i4.matrix() - Eigen::MatrixXcd::Identity(4, 4)) == 0.0);

  const Operator sx_sx = tensor(sigma_op("a", Axis::x), sigma_op("b", Axis::x));
  CHECK(std::abs(sx_sx.trace()) == 0.0);

  // Direct Kronecker expansion by hand: sigma_z (x) I = diag(1,1,-1,-1).
  const Operator sz_i = tensor(sigma_op("a", Axis::z), i2b);
  Eigen::Vector4cd expect(1.0, 1.0, -1.0, -1.0);
  CHECK(max_abs(sz_i.matrix() - Eigen::MatrixXcd(expect.asDiagonal())) == 0.0);
}

TEST_CASE("tensor: trace is multiplicative and label collisions are rejected") {
  std::mt19937 rng(7);
  const Operator a = Operator(HilbertSpace::single("a", 3), random_complex(3, rng));
  const Operator b = Operator(HilbertSpace::single("b", 2), random_complex(2, rng));
  const cplx lhs = tensor(a, b).trace();
  const cplx rhs = a.trace() * b.trace();
  CHECK(std::abs(lhs - rhs) < 1e-12);

  const Operator a2 = Operator(HilbertSpace::single("a", 2), random_complex(2, rng));
  CHECK_THROWS_AS(tensor(a, a2), config_error);
}

TEST_CASE("partial_trace: product states, Bell projector, traceless system factor") {
  std::mt19937 rng(11);
  const Eigen::MatrixXcd rho_m = random_density(2, rng);
  const Eigen::MatrixXcd sig_m = random_complex(2, rng);
  const Operator rho = op2("a", rho_m);
  const Operator sig = op2("b", sig_m);

  const Operator red = partial_trace(tensor(rho, sig), {"a"});
  CHECK(max_abs(red.matrix() - rho_m * sig_m.trace()) < 1e-12);

  // Maximally entangled state reduces to I/2.
  Eigen::Vector4cd bell;
  bell << 1.0, 0.0, 0.0, 1.0;
  bell /= std::sqrt(2.0);
  const HilbertSpace ab = HilbertSpace::single("a", 2).joined(HilbertSpace::single("b", 2));
  const Operator bell_proj(ab, bell * bell.adjoint());
  const Operator first = partial_trace(bell_proj, {"a"});
  CHECK(max_abs(first.matrix() - 0.5 * Eigen::MatrixXcd::Identity(2, 2)) < 1e-12);

  const Operator sys_sy = tensor(sigma_op("S", Axis::y), Operator(sig.space(), sig_m));
  const Operator traced = partial_trace(sys_sy, {"b"});
  CHECK(max_abs(traced.matrix()) < 1e-12);
}

TEST_CASE("partial_trace: preserves total trace, rejects unknown labels") {
  std::mt19937 rng(13);
  const HilbertSpace space({{"S", 2}, {"b0", 2}, {"b1", 3}});
  const Operator a(space, random_complex(12, rng));
  for (const auto& keep :
       std::vector<std::vector<std::string>>{{"S"}, {"b0"}, {"S", "b1"}, {"b0", "b1"}}) {
    const Operator r = partial_trace(a, keep);
    CHECK(std::abs(r.trace() - a.trace()) < 1e-10);
  }
  // Keeping everything is the identity, keeping nothing is the full trace.
  CHECK(max_abs(partial_trace(a, {"S", "b0", "b1"}).matrix() - a.matrix()) == 0.0);
  CHECK(std::abs(partial_trace(a, {}).matrix()(0, 0) - a.trace()) < 1e-12);
  CHECK_THROWS_AS(partial_trace(a, {"nope"}), config_error);
}

TEST_CASE("partial_trace: middle factor with mixed dimensions") {
  std::mt19937 rng(17);
  const Eigen::MatrixXcd am = random_complex(2, rng);
  const Eigen::MatrixXcd bm = random_complex(3, rng);
  const Eigen::MatrixXcd cm = random_complex(2, rng);
  const Operator a = op2("a", am);
  const Operator b(HilbertSpace::single("b", 3), bm);
  const Operator c = op2("c", cm);
  const Operator abc = tensor(tensor(a, b), c);
  const Operator kept = partial_trace(abc, {"a", "c"});
  Eigen::MatrixXcd expect(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) expect.block(i * 2, j * 2, 2, 2) = am(i, j) * cm;
  expect *= bm.trace();
  CHECK(max_abs(kept.matrix() - expect) < 1e-12);
}

TEST_CASE("evolve: zero time, rotating frame oracle, commuting pair") {
  std::mt19937 rng(19);
  const Operator a = op2("q", random_hermitian(2, rng));
  const double omega = 1.7;
  const Operator h = op2("q", Eigen::Matrix2cd(0.5 * omega * pauli(Axis::z)));
  CHECK(max_abs(evolve(a, h, 0.0).matrix() - a.matrix()) < 1e-12);

  // Oracle: diagonalize sigma_z by hand and conjugate term by term with 2x2
  // products; fixes the sign convention.
  for (double t : {0.3, 1.1, 2.9}) {
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Zero();
    u(0, 0) = std::exp(cplx(0.0, 0.5 * omega * t));
    u(1, 1) = std::exp(cplx(0.0, -0.5 * omega * t));
    const Eigen::Matrix2cd oracle = u * pauli(Axis::x) * u.adjoint();
    const Operator got = evolve(sigma_op("q", Axis::x), h, t);
    CHECK(max_abs(got.matrix() - oracle) < 1e-12);
    const Eigen::Matrix2cd closed =
        std::cos(omega * t) * pauli(Axis::x) - std::sin(omega * t) * pauli(Axis::y);
    CHECK(max_abs(got.matrix() - closed) < 1e-12);
  }

  CHECK(max_abs(evolve(sigma_op("q", Axis::z), h, 2.3).matrix() - pauli(Axis::z)) < 1e-12);
}

TEST_CASE("evolve: preserves trace and spectrum, rejects non-Hermitian generators") {
  std::mt19937 rng(23);
  for (int rep = 0; rep < 5; ++rep) {
    const Operator a(HilbertSpace::single("q", 4), random_hermitian(4, rng));
    const Operator h(a.space(), random_hermitian(4, rng));
    const Operator b = evolve(a, h, 0.9 + rep);
    CHECK(std::abs(a.trace() - b.trace()) < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ea(a.matrix()), eb(b.matrix());
    CHECK((ea.eigenvalues() - eb.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
  }
  const Operator bad(HilbertSpace::single("q", 2), random_complex(2, rng));
  const Operator x(bad.space(), random_hermitian(2, rng));
  CHECK_THROWS_AS(evolve(x, bad, 1.0), config_error);
}

TEST_CASE("super_apply: identity cases and Pauli algebra") {
  std::mt19937 rng(29);
  const Operator a = op2("q", random_hermitian(2, rng));
  const Operator id = Operator::identity(a.space());
  CHECK(max_abs(super_apply(SuperSign::minus, a, id).matrix()) < 1e-14);
  CHECK(max_abs(super_apply(SuperSign::plus, id, a).matrix() - a.matrix()) < 1e-14);

  // -i(sx sy - sy sx)/2 = sz, computed directly as the oracle.
  const Eigen::Matrix2cd oracle =
      cplx(0.0, -0.5) * (pauli(Axis::x) * pauli(Axis::y) - pauli(Axis::y) * pauli(Axis::x));
  CHECK(max_abs(oracle - pauli(Axis::z)) < 1e-15);
  const Operator got =
      super_apply(SuperSign::minus, sigma_op("q", Axis::x), sigma_op("q", Axis::y));
  CHECK(max_abs(got.matrix() - pauli(Axis::z)) < 1e-15);

  const Operator other(HilbertSpace::single("r", 3), random_hermitian(3, rng));
  CHECK_THROWS_AS(super_apply(SuperSign::plus, a, other), config_error);
}

TEST_CASE("super_apply: commutator traces vanish and Hermiticity is preserved") {
  std::mt19937 rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const HilbertSpace space = HilbertSpace::single("q", 4);
    const Operator a(space, random_hermitian(4, rng));
    const Operator x(space, random_hermitian(4, rng));
    CHECK(std::abs(super_apply(SuperSign::minus, a, x).trace()) < 1e-12);
    CHECK(super_apply(SuperSign::minus, a, x).hermiticity_residue() < 1e-12);
    CHECK(super_apply(SuperSign::plus, a, x).hermiticity_residue() < 1e-12);
  }
}

TEST_CASE("keystone identity -i[AB, C] = 2(A+B- + A-B+)C on random triples") {
  std::mt19937 rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    const int d = 2 + rep % 3;
    const HilbertSpace space = HilbertSpace::single("q", d);
    const Operator a(space, random_hermitian(d, rng));
    const Operator b(space, random_hermitian(d, rng));
    const Operator c(space, random_hermitian(d, rng));
    const Eigen::MatrixXcd ab = a.matrix() * b.matrix();
    const Eigen::MatrixXcd lhs = cplx(0.0, -1.0) * (ab * c.matrix() - c.matrix() * ab);
    const Operator rhs =
        cplx(2.0) * (super_apply(SuperSign::plus, a, super_apply(SuperSign::minus, b, c)) +
                     super_apply(SuperSign::minus, a, super_apply(SuperSign::plus, b, c)));
    CHECK(max_abs(lhs - rhs.matrix()) < 1e-10);
  }
}

TEST_CASE("SuperSign: bar swaps plus and minus") {
  CHECK(bar(SuperSign::plus) == SuperSign::minus);
  CHECK(bar(SuperSign::minus) == SuperSign::plus);
  CHECK(bar(bar(SuperSign::plus)) == SuperSign::plus);
}

TEST_CASE("HilbertSpace: invariants") {
  CHECK(HilbertSpace().dim() == 1);
  CHECK_THROWS_AS(HilbertSpace({{"a", 2}, {"a", 2}}), config_error);
  CHECK_THROWS_AS(HilbertSpace({{"a", 1}}), config_error);
  const HilbertSpace s({{"a", 2}, {"b", 3}});
  CHECK(s.dim() == 6);
  CHECK(s.factor_index("b") == 1);
  CHECK_THROWS_AS(s.factor_index("c"), config_error);
}
