#include "qbath/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace qbath {

namespace {

const HilbertSpace& system_space() {
  static const HilbertSpace space = HilbertSpace::single("S", 2);
  return space;
}

// Time-ordered chain value Tr[B^{eta_k}(t_k) ... B^{eta_1}(t_1) rho] with
// non-decreasing times (closed simplex; continuous extension of the strictly
// sorted correlation).
double chain_value(const BathModel& bath, const Operator& rho_b,
                   const std::vector<IndexEntry>& entries, double imag_tol = kDefaultTol) {
  Operator x = rho_b;
  for (const auto& e : entries) x = super_apply(e.sign, bath.field_at(e.axis, e.time), x);
  const cplx tr = x.trace();
  if (std::abs(tr.imag()) > imag_tol)
    throw numeric_error("dynamics: imaginary residue in correlation chain");
  return tr.real();
}

}  // namespace

std::vector<Operator> exact_reduced_dynamics(const Eigen::Matrix2cd& rho_s0,
                                             const SystemSpec& system, const BathModel& bath,
                                             const Operator& rho_b,
                                             const std::vector<double>& t_grid) {
  if ((rho_s0 - rho_s0.adjoint()).cwiseAbs().maxCoeff() > kDefaultTol)
    throw config_error("exact_reduced_dynamics: rho_s0 must be Hermitian");
  if (std::abs(rho_s0.trace().real() - 1.0) > kDefaultTol)
    throw config_error("exact_reduced_dynamics: rho_s0 must have unit trace");

  const Operator sys_rho(system_space(), rho_s0);
  const Operator joint_rho = tensor(sys_rho, rho_b);

  Operator h = tensor(Operator(system_space(), system.h_system),
                      Operator::identity(bath.space()));
  h += tensor(Operator::identity(system_space()), bath.hamiltonian());
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    if (!system.coupling_axes[static_cast<int>(a)] || bath.field_is_zero(a)) continue;
    h += tensor(Operator(system_space(), 0.5 * pauli(a)), bath.field_op(a));
  }

  const HermitianEigen eig(h);
  std::vector<Operator> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    const Operator u = eig.unitary(t);
    const Operator evolved(joint_rho.space(),
                           u.matrix() * joint_rho.matrix() * u.matrix().adjoint());
    Operator reduced = partial_trace(evolved, {"S"});
    if (std::abs(reduced.trace().real() - 1.0) > 1e-8)
      throw numeric_error("exact_reduced_dynamics: reduced state lost trace");
    out.push_back(std::move(reduced));
  }
  return out;
}

ExactDephasingSource::ExactDephasingSource(const BathModel& bath, Operator rho_b, int max_order)
    : bath_(bath), rho_b_(std::move(rho_b)), max_order_(max_order) {
  if (!bath_.is_pure_dephasing())
    throw config_error("ExactDephasingSource: bath is not pure dephasing");
}

double ExactDephasingSource::moment(const std::vector<double>& times) const {
  auto it = moment_memo_.find(times);
  if (it != moment_memo_.end()) return it->second;
  std::vector<IndexEntry> entries(times.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    entries[i] = IndexEntry{Axis::z, SuperSign::plus, times[i]};
  const double v = chain_value(bath_, rho_b_, entries);
  moment_memo_[times] = v;
  return v;
}

double ExactDephasingSource::cumulant(const std::vector<double>& times) const {
  const int n = static_cast<int>(times.size());
  if (n < 1 || n > max_order_)
    throw config_error("ExactDephasingSource: order out of range");
  if (!std::is_sorted(times.begin(), times.end()))
    throw config_error("ExactDephasingSource: times must be non-decreasing");
  auto it = cumulant_memo_.find(times);
  if (it != cumulant_memo_.end()) return it->second;
  double value = moment(times);
  if (n > 1) {
    for (const auto& part : set_partitions(n)) {
      if (part.size() < 2) continue;
      double prod = 1.0;
      for (const auto& block : part) {
        std::vector<double> sub;
        sub.reserve(block.size());
        for (int p : block) sub.push_back(times[p]);
        prod *= cumulant(sub);
      }
      value -= prod;
    }
  }
  cumulant_memo_[times] = value;
  return value;
}

TensorDephasingSource::TensorDephasingSource(const CorrelationTensor& tensor,
                                             std::vector<double> grid,
                                             bool values_are_cumulants)
    : grid_(std::move(grid)) {
  if (grid_.size() < 2 || !std::is_sorted(grid_.begin(), grid_.end()))
    throw config_error("TensorDephasingSource: grid must be sorted with >= 2 points");
  const int m = static_cast<int>(grid_.size());
  first_.assign(m, 0.0);
  std::vector<bool> first_known(m, false);
  second_ = Eigen::MatrixXd::Zero(m, m);
  second_known_ = Eigen::MatrixXd::Zero(m, m);

  for (const auto& [idx, val] : tensor.values()) {
    bool all_z_plus = true;
    for (const auto& e : idx.entries())
      if (e.axis != Axis::z || e.sign != SuperSign::plus) all_z_plus = false;
    if (!all_z_plus) continue;
    if (idx.order() == 1) {
      const int i = grid_index(idx.entries()[0].time);
      if (i >= 0) {
        first_[i] = val.value;
        first_known[i] = true;
        max_stderr_ = std::max(max_stderr_, val.stderror);
      }
    } else if (idx.order() == 2) {
      const int i = grid_index(idx.entries()[0].time);
      const int j = grid_index(idx.entries()[1].time);
      if (i >= 0 && j >= 0) {
        second_(j, i) = val.value;  // row = later time
        second_known_(j, i) = 1.0;
        max_stderr_ = std::max(max_stderr_, val.stderror);
      }
    }
  }

  for (int i = 0; i < m; ++i)
    if (!first_known[i])
      throw config_error("TensorDephasingSource: missing order-1 entry at grid point " +
                         std::to_string(grid_[i]));
  for (int j = 1; j < m; ++j)
    for (int i = 0; i < j; ++i)
      if (second_known_(j, i) == 0.0)
        throw config_error("TensorDephasingSource: missing order-2 entry for pair (" +
                           std::to_string(grid_[i]) + ", " + std::to_string(grid_[j]) + ")");

  if (!values_are_cumulants) {
    // Convert in place: C~(2,1) = C(2,1) - C~(2) C~(1); order 1 unchanged.
    for (int j = 1; j < m; ++j)
      for (int i = 0; i < j; ++i) second_(j, i) -= first_[j] * first_[i];
  }
}

int TensorDephasingSource::grid_index(double t) const {
  for (std::size_t i = 0; i < grid_.size(); ++i)
    if (std::abs(grid_[i] - t) <= 1e-12) return static_cast<int>(i);
  return -1;
}

double TensorDephasingSource::second_order(int i, int j) const {
  if (i < j) return second_(j, i);
  // Tied times: extrapolate along the row toward the diagonal (or down the
  // column at the left edge) from up to three nearest strict entries.
  const int m = static_cast<int>(grid_.size());
  std::vector<double> xs, ys;
  if (i >= 1) {
    for (int k = i - 1; k >= 0 && static_cast<int>(xs.size()) < 3; --k) {
      xs.push_back(grid_[k]);
      ys.push_back(second_(i, k));
    }
  } else {
    for (int k = 1; k < m && static_cast<int>(xs.size()) < 3; ++k) {
      xs.push_back(grid_[k]);
      ys.push_back(second_(k, 0));
    }
  }
  const double t = grid_[i];
  // Lagrange extrapolation at the tied point.
  double acc = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    double w = ys[a];
    for (std::size_t b = 0; b < xs.size(); ++b) {
      if (a == b) continue;
      w *= (t - xs[b]) / (xs[a] - xs[b]);
    }
    acc += w;
  }
  return acc;
}

double TensorDephasingSource::cumulant(const std::vector<double>& times) const {
  if (times.size() == 1) {
    const int i = grid_index(times[0]);
    if (i < 0) throw config_error("TensorDephasingSource: time off the grid");
    return first_[i];
  }
  if (times.size() == 2) {
    const int i = grid_index(times[0]);
    const int j = grid_index(times[1]);
    if (i < 0 || j < 0) throw config_error("TensorDephasingSource: time off the grid");
    return second_order(std::min(i, j), std::max(i, j));
  }
  throw config_error("TensorDephasingSource: grid tensors support truncation order <= 2");
}

namespace {

// Nested trapezoid over the sorted simplex 0 <= t_1 <= ... <= t_N <= grid[m],
// evaluated for every prefix m in one sweep. Returns J_N(m) per grid point.
std::vector<double> simplex_integrals(const DephasingCumulantSource& source, int order,
                                      const std::vector<double>& grid) {
  const int m = static_cast<int>(grid.size());
  auto trap_weight = [&](int j, int upper) {
    if (upper == 0) return 0.0;
    if (j == 0) return 0.5 * (grid[1] - grid[0]);
    if (j == upper) return 0.5 * (grid[upper] - grid[upper - 1]);
    return 0.5 * (grid[j + 1] - grid[j - 1]);
  };

  // memo[level] maps the packed suffix (i_{level+1}, .., i_N) to the value of
  // the level-fold inner integral with upper limit grid[suffix[0]].
  std::vector<std::unordered_map<std::uint64_t, double>> memo(order + 1);
  auto pack = [](const std::vector<int>& suffix) {
    std::uint64_t key = 1;
    for (int v : suffix) key = key * 4096 + static_cast<std::uint64_t>(v + 1);
    return key;
  };

  std::vector<double> times_buf;
  std::function<double(int, std::vector<int>&)> rec = [&](int level,
                                                          std::vector<int>& suffix) -> double {
    if (level == 0) {
      times_buf.resize(suffix.size());
      for (std::size_t i = 0; i < suffix.size(); ++i) times_buf[i] = grid[suffix[i]];
      return source.cumulant(times_buf);
    }
    const std::uint64_t key = pack(suffix);
    auto it = memo[level].find(key);
    if (it != memo[level].end()) return it->second;
    const int upper = suffix.empty() ? m - 1 : suffix.front();
    double acc = 0.0;
    std::vector<int> inner(suffix.size() + 1);
    std::copy(suffix.begin(), suffix.end(), inner.begin() + 1);
    for (int j = 0; j <= upper; ++j) {
      const double w = trap_weight(j, upper);
      if (w == 0.0) continue;
      inner[0] = j;
      acc += w * rec(level - 1, inner);
    }
    memo[level][key] = acc;
    return acc;
  };

  // J_N(m) = trapezoid over i_N <= m of the (N-1)-fold inner integral.
  std::vector<double> out(m, 0.0);
  for (int top = 0; top < m; ++top) {
    double acc = 0.0;
    for (int j = 0; j <= top; ++j) {
      const double w = trap_weight(j, top);
      if (w == 0.0) continue;
      std::vector<int> suffix{j};
      acc += w * rec(order - 1, suffix);
    }
    out[top] = acc;
  }
  return out;
}

std::vector<double> refine_grid(const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(grid.size() * 2 - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    out.push_back(grid[i]);
    out.push_back(0.5 * (grid[i] + grid[i + 1]));
  }
  out.push_back(grid.back());
  return out;
}

cplx minus_i_power(int n) {
  switch (n % 4) {
    case 1: return cplx(0.0, -1.0);
    case 2: return cplx(-1.0, 0.0);
    case 3: return cplx(0.0, 1.0);
    default: return cplx(1.0, 0.0);
  }
}

}  // namespace

DephasingPrediction cumulant_predicted_dephasing(const DephasingCumulantSource& source, int k,
                                                 const std::vector<double>& t_grid,
                                                 const Eigen::Matrix2cd& rho_s0,
                                                 const QuadratureOptions& options) {
  if (k < 2 || k % 2 != 0)
    throw config_error("cumulant_predicted_dephasing: truncation order K must be even and >= 2");
  if (k > source.max_order())
    throw config_error("cumulant_predicted_dephasing: source does not provide order " +
                       std::to_string(k));
  if (t_grid.size() < 2 || t_grid.front() != 0.0)
    throw config_error("cumulant_predicted_dephasing: time grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i - 1] < t_grid[i]))
      throw config_error("cumulant_predicted_dephasing: time grid must be strictly increasing");

  // Integrate on a working grid; refinable sources get midpoint doublings
  // until the top-order term is stable, grid-bound sources get a half-grid
  // error estimate instead.
  std::vector<double> work = t_grid;
  std::vector<int> report_at(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) report_at[i] = static_cast<int>(i);

  auto top_term_at_reports = [&](const std::vector<double>& grid,
                                 const std::vector<int>& positions) {
    const std::vector<double> full = simplex_integrals(source, k, grid);
    std::vector<double> out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) out[i] = full[positions[i]];
    return out;
  };

  double quad_err = 0.0;
  if (source.refinable()) {
    std::vector<double> prev = top_term_at_reports(work, report_at);
    for (int r = 0; r < options.max_refinements; ++r) {
      std::vector<double> finer = refine_grid(work);
      std::vector<int> finer_report(report_at.size());
      for (std::size_t i = 0; i < report_at.size(); ++i) finer_report[i] = report_at[i] * 2;
      const std::vector<double> cur = top_term_at_reports(finer, finer_report);
      quad_err = 0.0;
      for (std::size_t i = 0; i < cur.size(); ++i)
        quad_err = std::max(quad_err, std::abs(cur[i] - prev[i]));
      work = std::move(finer);
      report_at = std::move(finer_report);
      prev = cur;
      if (quad_err < options.term_tol) break;
    }
  } else {
    // Half-grid comparison on the even-indexed subgrid.
    if (t_grid.size() >= 3) {
      std::vector<double> coarse;
      std::vector<int> coarse_report;
      for (std::size_t i = 0; i < t_grid.size(); i += 2) {
        coarse.push_back(t_grid[i]);
        coarse_report.push_back(static_cast<int>(coarse.size()) - 1);
      }
      const std::vector<double> coarse_vals = top_term_at_reports(coarse, coarse_report);
      const std::vector<double> fine_vals = top_term_at_reports(t_grid, report_at);
      for (std::size_t i = 0; i < coarse.size(); ++i)
        quad_err = std::max(quad_err, std::abs(coarse_vals[i] - fine_vals[2 * i]));
      if (quad_err > options.term_tol)
        throw config_error(
            "cumulant_predicted_dephasing: grid too coarse (estimated quadrature error " +
            std::to_string(quad_err) + " exceeds tolerance)");
    }
  }

  // All orders on the final working grid.
  std::vector<std::vector<double>> integrals(k + 1);
  for (int n = 1; n <= k; ++n) integrals[n] = simplex_integrals(source, n, work);

  DephasingPrediction pred;
  pred.truncation_order = k;
  pred.times = t_grid;
  pred.quadrature_error = quad_err;
  const cplx rho01 = rho_s0(0, 1);
  pred.sz = (rho_s0(0, 0) - rho_s0(1, 1)).real();
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    cplx phi = 0.0;
    for (int n = 1; n <= k; ++n) phi += minus_i_power(n) * integrals[n][report_at[i]];
    const cplx coh = std::exp(phi);
    pred.coherence.push_back(coh);
    const cplx r01 = rho01 * coh;
    pred.sx.push_back(2.0 * r01.real());
    pred.sy.push_back(-2.0 * r01.imag());
  }
  return pred;
}

ComparisonReport compare(const std::vector<Operator>& exact, const DephasingPrediction& pred) {
  if (exact.size() != pred.times.size())
    throw config_error("compare: exact dynamics and prediction use different grids");
  ComparisonReport rep;
  rep.times = pred.times;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const auto& rho = exact[i].matrix();
    const double ex = (rho * pauli(Axis::x)).trace().real();
    const double ey = (rho * pauli(Axis::y)).trace().real();
    rep.exact_x.push_back(ex);
    rep.exact_y.push_back(ey);
    rep.pred_x.push_back(pred.sx[i]);
    rep.pred_y.push_back(pred.sy[i]);
    rep.deviation.push_back(std::max(std::abs(ex - pred.sx[i]), std::abs(ey - pred.sy[i])));
  }
  rep.max_deviation = *std::max_element(rep.deviation.begin(), rep.deviation.end());
  rep.integrated_deviation = 0.0;
  for (std::size_t i = 1; i < rep.times.size(); ++i)
    rep.integrated_deviation +=
        0.5 * (rep.deviation[i] + rep.deviation[i - 1]) * (rep.times[i] - rep.times[i - 1]);
  return rep;
}

Eigen::Matrix2cd reduced_series_second_order(const Eigen::Matrix2cd& rho_s0,
                                             const BathModel& bath, const Operator& rho_b,
                                             double t, int grid_points) {
  if (grid_points < 3) throw config_error("reduced_series_second_order: need >= 3 grid points");
  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i)
    grid[i] = t * static_cast<double>(i) / (grid_points - 1);

  auto s_apply = [](Axis a, SuperSign sign, const Eigen::Matrix2cd& x) {
    const Eigen::Matrix2cd s = 0.5 * pauli(a);
    if (sign == SuperSign::plus) return Eigen::Matrix2cd(0.5 * (s * x + x * s));
    return Eigen::Matrix2cd(cplx(0.0, -0.5) * (s * x - x * s));
  };

  Eigen::Matrix2cd acc = rho_s0;

  // First order: 2 sum_{alpha,eta} int_0^t C^{eta}_alpha(t1) S^{bar eta} rho.
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    if (bath.field_is_zero(a)) continue;
    for (SuperSign eta : {SuperSign::plus, SuperSign::minus}) {
      double integral = 0.0;
      std::vector<double> vals(grid_points);
      for (int i = 0; i < grid_points; ++i)
        vals[i] = chain_value(bath, rho_b, {{a, eta, grid[i]}});
      for (int i = 1; i < grid_points; ++i)
        integral += 0.5 * (vals[i] + vals[i - 1]) * (grid[i] - grid[i - 1]);
      acc += 2.0 * integral * s_apply(a, bar(eta), rho_s0);
    }
  }

  // Second order: 4 sum int_{t2>t1} C^{eta2 eta1}(t2,t1) S^{bar eta2} S^{bar eta1} rho.
  for (Axis a2 : {Axis::x, Axis::y, Axis::z}) {
    if (bath.field_is_zero(a2)) continue;
    for (Axis a1 : {Axis::x, Axis::y, Axis::z}) {
      if (bath.field_is_zero(a1)) continue;
      for (SuperSign e2 : {SuperSign::plus, SuperSign::minus})
        for (SuperSign e1 : {SuperSign::plus, SuperSign::minus}) {
          // Inner trapezoid over t1 in [0, t_j] at fixed t2 = t_j, then an
          // outer trapezoid over t2.
          std::vector<double> inner(grid_points, 0.0);
          for (int j = 1; j < grid_points; ++j) {
            double v = 0.0;
            for (int i = 1; i <= j; ++i) {
              const double fa =
                  chain_value(bath, rho_b, {{a1, e1, grid[i - 1]}, {a2, e2, grid[j]}});
              const double fb =
                  chain_value(bath, rho_b, {{a1, e1, grid[i]}, {a2, e2, grid[j]}});
              v += 0.5 * (fa + fb) * (grid[i] - grid[i - 1]);
            }
            inner[j] = v;
          }
          double integral = 0.0;
          for (int j = 1; j < grid_points; ++j)
            integral += 0.5 * (inner[j] + inner[j - 1]) * (grid[j] - grid[j - 1]);
          acc += 4.0 * integral * s_apply(a2, bar(e2), s_apply(a1, bar(e1), rho_s0));
        }
    }
  }
  return acc;
}

}  // namespace qbath
