#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qbath/bath.hpp"
#include "qbath/operator.hpp"
#include "qbath/rng.hpp"

namespace qbath {

// One weak-measurement slot: system prepared along prep_bloch, coupled to the
// bath for delta_t starting at `time`, then projectively measured along
// measure_axis (outcomes +/-1). The background condition prep . measure = 0
// is enforced at construction so single outcomes are zero-mean.
struct MeasurementConfig {
  double time = 0.0;
  Eigen::Vector3d prep_bloch = Eigen::Vector3d::UnitX();
  Eigen::Vector3d measure_axis = Eigen::Vector3d::UnitY();
  double delta_t = 0.05;

  MeasurementConfig() = default;
  MeasurementConfig(double t, const Eigen::Vector3d& prep, const Eigen::Vector3d& meas,
                    double dt);

  Eigen::Matrix2cd prep_density() const;      // (1 + r.sigma)/2
  Eigen::Matrix2cd observable() const;        // m.sigma
  Eigen::Vector2cd outcome_state(int lambda) const;  // eigenvector of m.sigma
};

enum class ChannelMode { first_order, exact_unitary };

struct ChannelOptions {
  ChannelMode mode = ChannelMode::exact_unitary;
  // Evolve the bath under H_B during the interaction window instead of
  // freezing the interaction-picture fields at the slot time (bias studies).
  bool evolve_bath_in_window = false;
};

// Bath superoperator as a dense matrix acting on vec(rho) (column-major).
class BathChannel {
public:
  BathChannel(HilbertSpace space, Eigen::MatrixXcd m);

  static BathChannel identity(const HilbertSpace& space);

  const HilbertSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  int op_dim() const { return op_dim_; }

  Operator apply(const Operator& x) const;
  Eigen::VectorXcd apply_vec(const Eigen::VectorXcd& v) const;

  friend BathChannel operator+(const BathChannel& a, const BathChannel& b);
  friend BathChannel operator-(const BathChannel& a, const BathChannel& b);

private:
  HilbertSpace space_;
  int op_dim_;
  Eigen::MatrixXcd m_;
};

// vec/unvec helpers (column-major) and the trace of the unvectorized state.
Eigen::VectorXcd vectorize(const Operator& x);
Operator unvectorize(const HilbertSpace& space, const Eigen::VectorXcd& v);
cplx vec_trace(const Eigen::VectorXcd& v, int dim);

// Conditional bath maps for the two outcomes of one slot.
struct KrausPair {
  BathChannel plus;   // outcome +1
  BathChannel minus;  // outcome -1

  BathChannel total() const { return plus + minus; }       // idle (averaged) channel
  BathChannel difference() const { return plus - minus; }  // sum_lambda lambda M_lambda
  const BathChannel& outcome(int lambda) const { return lambda > 0 ? plus : minus; }
};

KrausPair kraus_pair(const MeasurementConfig& config, const BathModel& bath,
                     const ChannelOptions& options);

// Choi matrix of a bath channel (PSD iff completely positive) and the
// worst-case deviation of Tr[M(E_ab)] from trace preservation.
Eigen::MatrixXcd channel_choi(const BathChannel& channel);
double channel_trace_residue(const BathChannel& channel);

// Joint probability of each outcome tuple; keys hold (lambda_1 .. lambda_N)
// earliest-first. Exact mode checks normalization to 1e-9; first-order mode
// clamps O(dt^2) negative mass to zero and renormalizes (with a warning on
// stderr).
std::map<std::vector<int>, double> joint_probabilities(
    const std::vector<MeasurementConfig>& configs, const BathModel& bath, const Operator& rho_b,
    const ChannelOptions& options);

// Measurement correlation G = sum_outcomes p * lambda_N ... lambda_1,
// evaluated directly through the signed channels.
double exact_G(const std::vector<MeasurementConfig>& configs, const BathModel& bath,
               const Operator& rho_b, const ChannelOptions& options);

// Trace distance of the idle channel from the identity at rho_b:
// (1/2) || sum_lambda M_lambda rho_b - rho_b ||_1.
double decoherence_norm(const MeasurementConfig& config, const BathModel& bath,
                        const Operator& rho_b, const ChannelOptions& options);

// Streaming protocol: equally spaced slots at t_k = k*tau (k = 1, 2, ...),
// templates cycled over `pattern`; idle slots are measured but their outputs
// are discarded by the estimators.
struct ScheduleSlot {
  bool used = true;
  Eigen::Vector3d prep = Eigen::Vector3d::UnitX();
  Eigen::Vector3d meas = Eigen::Vector3d::UnitY();
  double delta_t = 0.05;
};

struct ScheduleSpec {
  double tau = 0.5;
  int num_slots = 0;
  std::vector<ScheduleSlot> pattern;

  void validate() const;  // tau > 0, tau >= every delta_t, pattern nonempty
  int period() const { return static_cast<int>(pattern.size()); }
  double slot_time(int k) const { return tau * (k + 1); }
  const ScheduleSlot& slot_template(int k) const { return pattern[k % pattern.size()]; }
  MeasurementConfig config_at(int k) const;
  std::vector<int> used_offsets() const;  // within one period
  std::uint64_t hash() const;
};

// One repetition-resolved set of outcomes with slot metadata.
struct MeasurementRecord {
  std::uint64_t seed = 0;
  ChannelMode mode = ChannelMode::exact_unitary;
  bool streaming = false;
  std::uint64_t schedule_hash = 0;
  int num_slots = 0;
  int period = 0;  // streaming pattern length; num_slots for unit records
  std::vector<double> slot_times;
  std::vector<std::uint8_t> used;  // 1 used, 0 idle
  int shots = 0;                   // unit: repetitions; streaming: trajectories
  std::vector<std::int8_t> outcomes;  // shots x num_slots, entries +/-1

  std::int8_t outcome(int shot, int slot) const {
    return outcomes[static_cast<std::size_t>(shot) * num_slots + slot];
  }
};

// Unit-sequence protocol: the bath is reset to rho_b for every shot and the N
// slots are measured sequentially with conditioned-state updates.
// Deterministic given the seed; shots are sampled in parallel.
MeasurementRecord sample_records(const std::vector<MeasurementConfig>& configs,
                                 const BathModel& bath, const Operator& rho_b, int shots,
                                 std::uint64_t seed, const ChannelOptions& options);

// Streaming protocol: `shots` independent trajectories, each one long
// conditioned trajectory over the full schedule without resets.
MeasurementRecord sample_records(const ScheduleSpec& schedule, const BathModel& bath,
                                 const Operator& rho_b, int shots, std::uint64_t seed,
                                 const ChannelOptions& options);

// Exact G over the used subset of one schedule period, with idle slots
// applied as averaged channels.
double streaming_exact_G(const ScheduleSpec& schedule, const BathModel& bath,
                         const Operator& rho_b, const ChannelOptions& options);

// Unit-sequence configs matching the used slots of one schedule period.
std::vector<MeasurementConfig> schedule_unit_configs(const ScheduleSpec& schedule);

}  // namespace qbath
