#include "qbath/reconstruction.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace qbath {

double coefficient_A(const MeasurementConfig& config, Axis alpha, SuperSign eta) {
  const Eigen::Matrix2cd lambda = config.observable();
  const Eigen::Matrix2cd rho = config.prep_density();
  const Eigen::Matrix2cd s = 0.5 * pauli(alpha);
  Eigen::Matrix2cd applied;
  if (eta == SuperSign::plus)
    applied = 0.5 * (s * rho + rho * s);
  else
    applied = cplx(0.0, -0.5) * (s * rho - rho * s);
  const cplx a = 2.0 * (lambda * applied).trace();
  return a.real();
}

double forward_G(const CorrelationTensor& c, const std::vector<MeasurementConfig>& variant) {
  if (variant.empty()) throw config_error("forward_G: empty variant");
  const int n = static_cast<int>(variant.size());
  double dt_power = 1.0;
  for (const auto& cfg : variant) dt_power *= cfg.delta_t;

  // Per-slot coefficient table A_alpha^{bar eta} for all six (alpha, eta).
  std::vector<std::array<double, 6>> coeff(n);
  auto slot_of = [](Axis a, SuperSign s) {
    return 2 * static_cast<int>(a) + (s == SuperSign::plus ? 0 : 1);
  };
  for (int i = 0; i < n; ++i)
    for (Axis a : {Axis::x, Axis::y, Axis::z})
      for (SuperSign s : {SuperSign::plus, SuperSign::minus})
        coeff[i][slot_of(a, s)] = coefficient_A(variant[i], a, bar(s));

  double total = 0.0;
  std::vector<int> digit(n, 0);
  for (;;) {
    double prod = 1.0;
    for (int i = 0; i < n; ++i) prod *= coeff[i][digit[i]];
    if (std::abs(prod) > 1e-15) {
      const int last = digit[n - 1];
      if (last % 2 == 0) {  // eta_N = minus indices vanish identically
        std::vector<IndexEntry> entries(n);
        for (int i = 0; i < n; ++i) {
          entries[i].axis = static_cast<Axis>(digit[i] / 2);
          entries[i].sign = digit[i] % 2 == 0 ? SuperSign::plus : SuperSign::minus;
          entries[i].time = variant[i].time;
        }
        total += prod * c.value(CorrelationIndex(std::move(entries)));
      }
    }
    int i = n - 1;
    while (i >= 0 && digit[i] == 5) digit[i--] = 0;
    if (i < 0) break;
    ++digit[i];
  }
  return dt_power * total;
}

Axis family_prep_axis(SlotFamily f) {
  switch (f) {
    case SlotFamily::xy: return Axis::x;
    case SlotFamily::yz: return Axis::y;
    default: return Axis::z;
  }
}

Axis family_meas_axis(SlotFamily f) {
  switch (f) {
    case SlotFamily::xy: return Axis::y;
    case SlotFamily::yz: return Axis::z;
    default: return Axis::x;
  }
}

Axis family_cross_axis(SlotFamily f) {
  switch (f) {
    case SlotFamily::xy: return Axis::z;
    case SlotFamily::yz: return Axis::x;
    default: return Axis::y;
  }
}

namespace {

Eigen::Vector3d axis_vector(Axis a) {
  Eigen::Vector3d v = Eigen::Vector3d::Zero();
  v(static_cast<int>(a)) = 1.0;
  return v;
}

}  // namespace

double ConfigSet::smallest_singular_value() const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design);
  return svd.singularValues().minCoeff();
}

ConfigSet build_config_set(int order, const std::vector<double>& times, double delta_t,
                           const std::vector<SlotFamily>& families) {
  if (order < 1) throw config_error("build_config_set: order must be >= 1");
  if (static_cast<int>(times.size()) != order || static_cast<int>(families.size()) != order)
    throw config_error("build_config_set: need one time and one family per slot");
  for (int i = 1; i < order; ++i)
    if (!(times[i - 1] < times[i]))
      throw config_error("build_config_set: times must be strictly increasing");
  if (!(delta_t > 0.0)) throw config_error("build_config_set: delta_t must be > 0");

  ConfigSet set;
  set.order = order;
  set.delta_t = delta_t;
  set.times = times;
  set.families = families;

  const int num_signed = order - 1;
  const int num_variants = 1 << num_signed;

  for (int v = 0; v < num_variants; ++v) {
    ConfigVariant variant;
    for (int slot = 0; slot < order; ++slot) {
      const int sign = (slot < num_signed && ((v >> slot) & 1)) ? -1 : +1;
      variant.prep_signs.push_back(sign);
      variant.slots.emplace_back(times[slot], sign * axis_vector(family_prep_axis(families[slot])),
                                 axis_vector(family_meas_axis(families[slot])), delta_t);
    }
    set.variants.push_back(std::move(variant));
  }

  // Unknowns: per early slot either the commutator index (meas axis, -) or the
  // anticommutator index (cross axis, +); the latest slot is always
  // (cross axis, +) since eta_N = - correlations vanish.
  for (int u = 0; u < num_variants; ++u) {
    std::vector<IndexEntry> entries(order);
    for (int slot = 0; slot < order; ++slot) {
      const bool anticom = slot == order - 1 || ((u >> slot) & 1);
      entries[slot].axis =
          anticom ? family_cross_axis(families[slot]) : family_meas_axis(families[slot]);
      entries[slot].sign = anticom ? SuperSign::plus : SuperSign::minus;
      entries[slot].time = times[slot];
    }
    set.targets.emplace_back(std::move(entries));
  }

  set.design.resize(num_variants, num_variants);
  for (int v = 0; v < num_variants; ++v)
    for (int u = 0; u < num_variants; ++u) {
      double e = 1.0;
      for (int slot = 0; slot < num_signed; ++slot)
        if ((u >> slot) & 1) e *= set.variants[v].prep_signs[slot];
      set.design(v, u) = e;
    }
  return set;
}

ConfigSet build_config_set(int order, const std::vector<double>& times, double delta_t,
                           SlotFamily family) {
  return build_config_set(order, times, delta_t,
                          std::vector<SlotFamily>(static_cast<std::size_t>(order), family));
}

GEstimate estimate_G(const MeasurementRecord& record, const std::vector<int>& slots,
                     int variant_id, const std::vector<double>& expected_times) {
  if (slots.empty()) throw config_error("estimate_G: slot subset must be nonempty");
  for (std::size_t i = 1; i < slots.size(); ++i)
    if (slots[i - 1] >= slots[i]) throw config_error("estimate_G: slots must be ascending");

  const int n = static_cast<int>(slots.size());
  if (!expected_times.empty()) {
    if (static_cast<int>(expected_times.size()) != n)
      throw config_error("estimate_G: slot subset does not match the variant size");
    for (int i = 0; i < n; ++i) {
      if (slots[i] >= record.num_slots)
        throw config_error("estimate_G: slot index outside the record");
      if (std::abs(record.slot_times[slots[i]] - expected_times[i]) > 1e-9)
        throw config_error("estimate_G: subset times do not match the variant's nominal times");
    }
  }

  double sum = 0.0, sumsq = 0.0;
  long count = 0;
  const int windows = record.streaming ? record.num_slots / record.period : 1;
  for (int shot = 0; shot < record.shots; ++shot) {
    for (int w = 0; w < windows; ++w) {
      const int base = w * record.period;
      double prod = 1.0;
      bool in_range = true;
      for (int s : slots) {
        const int slot = record.streaming ? base + s : s;
        if (slot >= record.num_slots) {
          in_range = false;
          break;
        }
        if (!record.used[slot])
          throw config_error("estimate_G: subset selects an idle slot");
        prod *= record.outcome(shot, slot);
      }
      if (!in_range) continue;
      sum += prod;
      sumsq += prod * prod;
      ++count;
    }
  }
  if (count < 1) throw config_error("estimate_G: no complete windows in the record");

  GEstimate est;
  est.shots = count;
  est.variant = variant_id;
  est.value = sum / count;
  if (count > 1) {
    const double var = std::max(0.0, (sumsq - count * est.value * est.value) / (count - 1));
    est.stderror = std::sqrt(var / count);
  }
  return est;
}

std::vector<GEstimate> exact_G_estimates(const ConfigSet& set, const BathModel& bath,
                                         const Operator& rho_b, const ChannelOptions& options) {
  std::vector<GEstimate> out(set.variants.size());
  parallel_for(set.variants.size(), [&](std::size_t v) {
    GEstimate est;
    est.value = exact_G(set.variants[v].slots, bath, rho_b, options);
    est.stderror = 0.0;
    est.shots = 0;
    est.variant = static_cast<int>(v);
    out[v] = est;
  });
  return out;
}

CorrelationTensor reconstruct(const std::vector<GEstimate>& estimates, const ConfigSet& set) {
  const int rows = static_cast<int>(set.variants.size());
  const int cols = static_cast<int>(set.targets.size());
  if (static_cast<int>(estimates.size()) != rows)
    throw config_error("reconstruct: need one G estimate per variant");

  double dt_power = 1.0;
  for (int i = 0; i < set.order; ++i) dt_power *= set.delta_t;

  Eigen::VectorXd g(rows), sigma(rows);
  for (int v = 0; v < rows; ++v) {
    g(v) = estimates[v].value / dt_power;
    sigma(v) = estimates[v].stderror / dt_power;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(set.design,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double rank_tol = sv.size() > 0 ? sv(0) * 1e-10 : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_tol) ++rank;
  if (rank < cols) {
    // Name the indices with weight in the null space of the design.
    std::string names;
    for (int u = 0; u < cols; ++u) {
      double null_weight = 0.0;
      for (Eigen::Index k = rank; k < sv.size(); ++k)
        null_weight += std::abs(svd.matrixV()(u, k));
      if (null_weight > 1e-8) {
        if (!names.empty()) names += ", ";
        names += "C^{" + set.targets[u].sign_string() + "}_{" + set.targets[u].axis_string() + "}";
      }
    }
    throw config_error("reconstruct: design matrix is rank deficient; unidentifiable indices: " +
                       names);
  }

  // Pseudo-inverse solve with per-index variance propagation.
  Eigen::MatrixXd pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() *
                         svd.matrixU().transpose();
  const Eigen::VectorXd x = pinv * g;

  CorrelationTensor out;
  for (int u = 0; u < cols; ++u) {
    double var = 0.0;
    for (int v = 0; v < rows; ++v) var += pinv(u, v) * pinv(u, v) * sigma(v) * sigma(v);
    out.set(set.targets[u],
            CorrelationValue{x(u), CorrelationSource::reconstructed, std::sqrt(var)});
  }
  return out;
}

std::vector<MeasurementConfig> dephasing_shortcut_configs(const std::vector<SuperSign>& signs,
                                                          const std::vector<double>& times,
                                                          double delta_t) {
  if (signs.empty() || signs.size() != times.size())
    throw config_error("dephasing_shortcut_configs: need one sign per time");
  if (signs.back() != SuperSign::plus)
    throw config_error("dephasing_shortcut_configs: eta_N must be + (minus vanishes)");
  std::vector<MeasurementConfig> configs;
  for (std::size_t i = 0; i < signs.size(); ++i) {
    const Axis meas = signs[i] == SuperSign::plus ? Axis::y : Axis::z;
    configs.emplace_back(times[i], Eigen::Vector3d::UnitX(), axis_vector(meas), delta_t);
  }
  return configs;
}

DephasingReconstruction dephasing_shortcuts(const std::vector<DephasingGValue>& gs,
                                            const std::vector<double>& times, double delta_t,
                                            const BathModel& bath) {
  if (!bath.is_pure_dephasing())
    throw config_error("dephasing_shortcuts: model is not pure dephasing (B_x, B_y must vanish)");
  if (gs.empty()) throw config_error("dephasing_shortcuts: no G values");
  const int n = static_cast<int>(times.size());
  double dt_power = 1.0;
  for (int i = 0; i < n; ++i) dt_power *= delta_t;

  DephasingReconstruction out;
  std::map<std::string, std::vector<std::pair<double, double>>> grouped;  // normalized, sigma
  for (const auto& gv : gs) {
    if (static_cast<int>(gv.target_signs.size()) != n ||
        static_cast<int>(gv.prep_signs.size()) != n)
      throw config_error("dephasing_shortcuts: sign pattern size mismatch");
    if (gv.target_signs.back() != SuperSign::plus)
      throw config_error("dephasing_shortcuts: eta_N must be +");
    // Preparation signs enter only on anticommutator slots.
    double parity = 1.0;
    std::string key;
    for (int i = 0; i < n; ++i) {
      key.push_back(sign_char(gv.target_signs[i]));
      if (gv.target_signs[i] == SuperSign::plus) parity *= gv.prep_signs[i];
    }
    grouped[key].push_back({parity * gv.g.value, gv.g.stderror});
  }

  for (const auto& [key, group] : grouped) {
    double mean = 0.0, var = 0.0;
    for (const auto& [v, s] : group) mean += v;
    mean /= static_cast<double>(group.size());
    for (const auto& [v, s] : group) var += s * s;
    var /= static_cast<double>(group.size() * group.size());
    for (std::size_t i = 0; i < group.size(); ++i)
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const double diff = std::abs(group[i].first - group[j].first);
        const double tol =
            4.0 * std::sqrt(group[i].second * group[i].second + group[j].second * group[j].second);
        if (diff > std::max(tol, 1e-12))
          out.flags.push_back("sign identity violated for pattern " + key + ": |Delta G| = " +
                              std::to_string(diff) + " > " + std::to_string(tol));
      }

    std::vector<IndexEntry> entries(n);
    for (int i = 0; i < n; ++i) {
      entries[i].axis = Axis::z;
      entries[i].sign = key[i] == '+' ? SuperSign::plus : SuperSign::minus;
      entries[i].time = times[i];
    }
    out.entries.set(CorrelationIndex(std::move(entries)),
                    CorrelationValue{mean / dt_power, CorrelationSource::reconstructed,
                                     std::sqrt(var) / dt_power});
  }
  return out;
}

}  // namespace qbath
