#pragma once

#include <memory>
#include <vector>

#include "qbath/bath.hpp"
#include "qbath/correlations.hpp"

namespace qbath {

// rho^S(t) = Tr_B[e^{-iHt} (rho_s0 (x) rho_b) e^{iHt}] with
// H = H_S (x) 1 + 1 (x) H_B + sum_alpha S_alpha (x) B_alpha, by full
// diagonalization. Returned operators live on the system space.
std::vector<Operator> exact_reduced_dynamics(const Eigen::Matrix2cd& rho_s0,
                                             const SystemSpec& system, const BathModel& bath,
                                             const Operator& rho_b,
                                             const std::vector<double>& t_grid);

// Provider of pure-dephasing cumulants C~^{+..+}_{z..z}(t_n..t_1) evaluated on
// the closed time simplex (non-decreasing arguments; the chain value is
// continuous there, so ties carry the natural limit).
class DephasingCumulantSource {
public:
  virtual ~DephasingCumulantSource() = default;
  virtual double cumulant(const std::vector<double>& times) const = 0;
  virtual int max_order() const = 0;
  // Grid-bound sources cannot be evaluated off their grid (no refinement).
  virtual bool refinable() const = 0;
};

// Exact source backed by a bath model; moments by nested superoperator
// application, cumulants by the partition recursion, both memoized.
class ExactDephasingSource : public DephasingCumulantSource {
public:
  ExactDephasingSource(const BathModel& bath, Operator rho_b, int max_order = 8);
  double cumulant(const std::vector<double>& times) const override;
  int max_order() const override { return max_order_; }
  bool refinable() const override { return true; }

private:
  double moment(const std::vector<double>& times) const;
  const BathModel& bath_;
  Operator rho_b_;
  int max_order_;
  mutable std::map<std::vector<double>, double> moment_memo_;
  mutable std::map<std::vector<double>, double> cumulant_memo_;
};

// Source backed by a tabulated tensor of all-z, all-plus entries on a strict
// time grid (exact or reconstructed). Supports orders 1 and 2; the diagonal
// (tied times) is completed by polynomial extrapolation from the nearest
// strict entries.
class TensorDephasingSource : public DephasingCumulantSource {
public:
  // values_are_cumulants = false: `tensor` holds moments and must contain the
  // order-1 entries needed by the recursion.
  TensorDephasingSource(const CorrelationTensor& tensor, std::vector<double> grid,
                        bool values_are_cumulants);
  double cumulant(const std::vector<double>& times) const override;
  int max_order() const override { return 2; }
  bool refinable() const override { return false; }

  // Worst-case propagated standard error of cumulant values (0 for exact
  // tensors); used for closure bands.
  double max_stderror() const { return max_stderr_; }

private:
  int grid_index(double t) const;
  double second_order(int i, int j) const;  // i <= j
  std::vector<double> grid_;
  std::vector<double> first_;                // order-1 cumulants per grid point
  Eigen::MatrixXd second_;                   // strict pairs (row = later index)
  Eigen::MatrixXd second_known_;
  double max_stderr_ = 0.0;
};

struct QuadratureOptions {
  int max_refinements = 4;     // grid doublings for refinable sources
  double term_tol = 1e-6;      // stop when the top-order term is stable to this
};

struct DephasingPrediction {
  int truncation_order = 2;
  std::vector<double> times;
  std::vector<cplx> coherence;  // rho_01(t) / rho_01(0)
  std::vector<double> sx, sy;
  double sz = 0.0;              // constant under pure dephasing
  double quadrature_error = 0.0;
};

// Coherence prediction from the cumulant series truncated at even order K:
// rho_01(t) = rho_01(0) exp(sum_{N<=K} (-i)^N I_N(t)) with I_N the sorted
// simplex integral of the order-N cumulant, evaluated by nested trapezoid.
// t_grid must start at 0 and be strictly increasing.
DephasingPrediction cumulant_predicted_dephasing(const DephasingCumulantSource& source, int k,
                                                 const std::vector<double>& t_grid,
                                                 const Eigen::Matrix2cd& rho_s0,
                                                 const QuadratureOptions& options = {});

struct ComparisonReport {
  std::vector<double> times;
  std::vector<double> exact_x, exact_y, pred_x, pred_y, deviation;
  double max_deviation = 0.0;
  double integrated_deviation = 0.0;
};

// Per-time deviations of <sigma_x>, <sigma_y> between exact reduced states
// and a prediction on the same grid.
ComparisonReport compare(const std::vector<Operator>& exact, const DephasingPrediction& pred);

// Second-order truncation of the general-coupling reduced-dynamics series
// (smoke-test companion to the dephasing specialization).
Eigen::Matrix2cd reduced_series_second_order(const Eigen::Matrix2cd& rho_s0,
                                             const BathModel& bath, const Operator& rho_b,
                                             double t, int grid_points);

}  // namespace qbath
