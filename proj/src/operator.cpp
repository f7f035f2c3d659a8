#include "qbath/operator.hpp"

#include <algorithm>
#include <set>

namespace qbath {

Operator::Operator(HilbertSpace space, Eigen::MatrixXcd entries)
    : space_(std::move(space)), mat_(std::move(entries)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() != space_.dim())
    throw config_error("Operator: entries must be a square matrix matching the space dimension");
}

Operator Operator::zero(const HilbertSpace& space) {
  return Operator(space, Eigen::MatrixXcd::Zero(space.dim(), space.dim()));
}

Operator Operator::identity(const HilbertSpace& space) {
  return Operator(space, Eigen::MatrixXcd::Identity(space.dim(), space.dim()));
}

double Operator::hermiticity_residue() const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

void require_same_space(const Operator& a, const Operator& b, const char* what) {
  if (a.space() != b.space())
    throw config_error(std::string(what) + ": operators live on different spaces");
}

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_space(*this, rhs, "operator+");
  mat_ += rhs.mat_;
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_space(*this, rhs, "operator-");
  mat_ -= rhs.mat_;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_space(a, b, "operator*");
  return Operator(a.space_, a.mat_ * b.mat_);
}

Operator tensor(const Operator& a, const Operator& b) {
  const HilbertSpace joint = a.space().joined(b.space());
  const auto& A = a.matrix();
  const auto& B = b.matrix();
  const int da = static_cast<int>(A.rows());
  const int db = static_cast<int>(B.rows());
  Eigen::MatrixXcd out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < da; ++j) out.block(i * db, j * db, db, db) = A(i, j) * B;
  return Operator(joint, std::move(out));
}

Operator partial_trace(const Operator& a, const std::vector<std::string>& keep) {
  const auto& factors = a.space().factors();
  const std::size_t m = factors.size();

  std::set<std::string> keep_set;
  for (const auto& label : keep) {
    a.space().factor_index(label);  // throws on unknown label
    keep_set.insert(label);
  }

  std::vector<int> kept_pos, traced_pos;
  for (std::size_t i = 0; i < m; ++i) {
    if (keep_set.count(factors[i].label))
      kept_pos.push_back(static_cast<int>(i));
    else
      traced_pos.push_back(static_cast<int>(i));
  }

  // Row-major strides: factor 0 is the slowest index.
  std::vector<long> stride(m, 1);
  for (int i = static_cast<int>(m) - 2; i >= 0; --i)
    stride[i] = stride[i + 1] * factors[i + 1].dim;

  auto offsets_for = [&](const std::vector<int>& pos) {
    long count = 1;
    for (int p : pos) count *= factors[p].dim;
    std::vector<long> offs(count, 0);
    long repeat = 1;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
      const int d = factors[*it].dim;
      const long s = stride[*it];
      for (long i = 0; i < count; ++i) offs[i] += ((i / repeat) % d) * s;
      repeat *= d;
    }
    return offs;
  };

  const std::vector<long> kept_off = offsets_for(kept_pos);
  const std::vector<long> traced_off = offsets_for(traced_pos);
  const long dk = static_cast<long>(kept_off.size());

  std::vector<SpaceFactor> kept_factors;
  for (int p : kept_pos) kept_factors.push_back(factors[p]);
  HilbertSpace out_space(kept_factors);

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  const auto& A = a.matrix();
  for (long r = 0; r < dk; ++r)
    for (long c = 0; c < dk; ++c) {
      cplx acc = 0.0;
      for (long s : traced_off) acc += A(kept_off[r] + s, kept_off[c] + s);
      out(r, c) = acc;
    }
  return Operator(std::move(out_space), std::move(out));
}

}  // namespace qbath
