#pragma once

#include <vector>

#include "qbath/correlations.hpp"
#include "qbath/measurement.hpp"

namespace qbath {

// Coefficient A_alpha^eta(t_n) = 2 Tr_S[Lambda_n S_alpha^eta rho_n^S] with
// S_alpha = sigma_alpha/2. For a spin-1/2 probe this evaluates to m_alpha for
// eta = + and (r x m)_alpha for eta = -.
double coefficient_A(const MeasurementConfig& config, Axis alpha, SuperSign eta);

// Leading-order forward model: G = prod_n dt * sum over per-slot (alpha, eta)
// of A^{bar eta}...A^{bar eta} C^{eta...}. Indices with eta_N = minus vanish
// identically and are skipped; every other index with a nonzero coefficient
// product must be present in the tensor.
double forward_G(const CorrelationTensor& c, const std::vector<MeasurementConfig>& variant);

// Per-slot probe family: preparation base axis / measurement axis. Each family
// addresses one commutator index (meas axis, -) with unit coefficient and one
// anticommutator index (prep x meas axis, +) with the preparation sign.
enum class SlotFamily { xy, yz, zx };

Axis family_meas_axis(SlotFamily f);
Axis family_prep_axis(SlotFamily f);
Axis family_cross_axis(SlotFamily f);

struct ConfigVariant {
  std::vector<MeasurementConfig> slots;
  std::vector<int> prep_signs;
};

// The 2^{N-1} spin-1/2 configuration set: slots 1..N-1 take both preparation
// signs, the latest slot a single fixed one (its commutator component
// vanishes). The design matrix over the targeted indices is +-1-valued of
// Hadamard type and exactly invertible.
struct ConfigSet {
  int order = 0;
  double delta_t = 0.0;
  std::vector<double> times;
  std::vector<SlotFamily> families;
  std::vector<ConfigVariant> variants;
  std::vector<CorrelationIndex> targets;
  Eigen::MatrixXd design;  // variants x targets, delta_t^N divided out

  double smallest_singular_value() const;
};

ConfigSet build_config_set(int order, const std::vector<double>& times, double delta_t,
                           const std::vector<SlotFamily>& families);

// Convenience: the same family at every slot.
ConfigSet build_config_set(int order, const std::vector<double>& times, double delta_t,
                           SlotFamily family = SlotFamily::xy);

struct GEstimate {
  double value = 0.0;
  double stderror = 0.0;
  long shots = 0;
  int variant = 0;
};

// Sample mean of the outcome product over the given slot subset: across shots
// for unit records, across disjoint pattern windows (and trajectories) for
// streaming records. expected_times, when nonempty, are validated against the
// record's slot times.
GEstimate estimate_G(const MeasurementRecord& record, const std::vector<int>& slots,
                     int variant_id, const std::vector<double>& expected_times = {});

// Exact G for every variant of a config set (noise-free path, stderr = 0).
std::vector<GEstimate> exact_G_estimates(const ConfigSet& set, const BathModel& bath,
                                         const Operator& rho_b, const ChannelOptions& options);

// Least-squares solve of the config-set design for the targeted correlations,
// with stderr propagated through the pseudo-inverse. Throws config_error on
// rank deficiency, naming the unidentifiable indices.
CorrelationTensor reconstruct(const std::vector<GEstimate>& estimates, const ConfigSet& set);

// Pure-dephasing closed forms. A shortcut configuration for the target sign
// pattern (eta_1..eta_N, eta_N = +) preps along +x at every slot and measures
// along y where eta_n = + and along z where eta_n = - ; then
// C^{eta...}_{z...z} = G / dt^N.
std::vector<MeasurementConfig> dephasing_shortcut_configs(const std::vector<SuperSign>& signs,
                                                          const std::vector<double>& times,
                                                          double delta_t);

struct DephasingGValue {
  std::vector<SuperSign> target_signs;  // per slot, earliest first; back() must be +
  std::vector<int> prep_signs;          // per slot +-1
  GEstimate g;
};

struct DephasingReconstruction {
  CorrelationTensor entries;
  std::vector<std::string> flags;  // sign-identity violations beyond 4 sigma
};

// Groups the G values by target sign pattern, checks the pure-dephasing sign
// identities (G_s * prod of prep signs on anticommutator slots is
// sign-invariant), and returns C^{eta...}_{z..z} = G / dt^N entries.
DephasingReconstruction dephasing_shortcuts(const std::vector<DephasingGValue>& gs,
                                            const std::vector<double>& times, double delta_t,
                                            const BathModel& bath);

}  // namespace qbath
