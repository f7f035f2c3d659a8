#include "qbath/measurement.hpp"

#include <cmath>
#include <iostream>

namespace qbath {

namespace {

const HilbertSpace& system_space() {
  static const HilbertSpace space = HilbertSpace::single("S", 2);
  return space;
}

Eigen::Vector2cd bloch_spinor(const Eigen::Vector3d& n) {
  const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double phi = std::atan2(n.y(), n.x());
  Eigen::Vector2cd v;
  v(0) = std::cos(0.5 * theta);
  v(1) = std::sin(0.5 * theta) * std::exp(cplx(0.0, phi));
  return v;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Left/right multiplication superoperators on vec(X), column-major:
// vec(AX) = (I (x) A) vec(X), vec(XA) = (A^T (x) I) vec(X).
Eigen::MatrixXcd left_mult(const Eigen::MatrixXcd& a) {
  return kron(Eigen::MatrixXcd::Identity(a.rows(), a.cols()), a);
}
Eigen::MatrixXcd right_mult(const Eigen::MatrixXcd& a) {
  return kron(a.transpose(), Eigen::MatrixXcd::Identity(a.rows(), a.cols()));
}

Eigen::MatrixXcd super_plus_matrix(const Eigen::MatrixXcd& a) {
  return 0.5 * (left_mult(a) + right_mult(a));
}
Eigen::MatrixXcd super_minus_matrix(const Eigen::MatrixXcd& a) {
  return cplx(0.0, -0.5) * (left_mult(a) - right_mult(a));
}

}  // namespace

MeasurementConfig::MeasurementConfig(double t, const Eigen::Vector3d& prep,
                                     const Eigen::Vector3d& meas, double dt)
    : time(t), prep_bloch(prep), measure_axis(meas), delta_t(dt) {
  if (std::abs(prep_bloch.norm() - 1.0) > kDefaultTol)
    throw config_error("MeasurementConfig: prep Bloch vector must be unit length");
  if (std::abs(measure_axis.norm() - 1.0) > kDefaultTol)
    throw config_error("MeasurementConfig: measurement axis must be unit length");
  if (std::abs(prep_bloch.dot(measure_axis)) > kDefaultTol)
    throw config_error(
        "MeasurementConfig: background condition violated (prep axis not orthogonal to "
        "measurement axis)");
  if (!(delta_t > 0.0)) throw config_error("MeasurementConfig: delta_t must be > 0");
}

Eigen::Matrix2cd MeasurementConfig::prep_density() const {
  Eigen::Matrix2cd m = 0.5 * pauli_identity();
  m += 0.5 * (prep_bloch.x() * pauli(Axis::x) + prep_bloch.y() * pauli(Axis::y) +
              prep_bloch.z() * pauli(Axis::z));
  return m;
}

Eigen::Matrix2cd MeasurementConfig::observable() const {
  return measure_axis.x() * pauli(Axis::x) + measure_axis.y() * pauli(Axis::y) +
         measure_axis.z() * pauli(Axis::z);
}

Eigen::Vector2cd MeasurementConfig::outcome_state(int lambda) const {
  return bloch_spinor(lambda > 0 ? Eigen::Vector3d(measure_axis)
                                 : Eigen::Vector3d(-measure_axis));
}

BathChannel::BathChannel(HilbertSpace space, Eigen::MatrixXcd m)
    : space_(std::move(space)), op_dim_(space_.dim()), m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() != static_cast<Eigen::Index>(op_dim_) * op_dim_)
    throw config_error("BathChannel: matrix must be d^2 x d^2 for the bath space");
}

BathChannel BathChannel::identity(const HilbertSpace& space) {
  const int d = space.dim();
  return BathChannel(space, Eigen::MatrixXcd::Identity(d * d, d * d));
}

Operator BathChannel::apply(const Operator& x) const {
  if (x.space() != space_) throw config_error("BathChannel: operator on a different space");
  return unvectorize(space_, m_ * vectorize(x));
}

Eigen::VectorXcd BathChannel::apply_vec(const Eigen::VectorXcd& v) const { return m_ * v; }

BathChannel operator+(const BathChannel& a, const BathChannel& b) {
  if (a.space_ != b.space_) throw config_error("BathChannel: space mismatch");
  return BathChannel(a.space_, a.m_ + b.m_);
}

BathChannel operator-(const BathChannel& a, const BathChannel& b) {
  if (a.space_ != b.space_) throw config_error("BathChannel: space mismatch");
  return BathChannel(a.space_, a.m_ - b.m_);
}

Eigen::VectorXcd vectorize(const Operator& x) {
  const auto& m = x.matrix();
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Operator unvectorize(const HilbertSpace& space, const Eigen::VectorXcd& v) {
  const int d = space.dim();
  Eigen::MatrixXcd m = Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
  return Operator(space, std::move(m));
}

cplx vec_trace(const Eigen::VectorXcd& v, int dim) {
  cplx t = 0.0;
  for (int i = 0; i < dim; ++i) t += v(static_cast<Eigen::Index>(i) * dim + i);
  return t;
}

namespace {

// Bath-block Kraus operator <lambda| U |prep> of the joint unitary.
Eigen::MatrixXcd joint_block(const Eigen::MatrixXcd& u, const Eigen::Vector2cd& bra,
                             const Eigen::Vector2cd& ket, int d) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp)
      out += std::conj(bra(s)) * ket(sp) * u.block(s * d, sp * d, d, d);
  return out;
}

Eigen::MatrixXcd exact_window_unitary(const MeasurementConfig& config, const BathModel& bath,
                                      const ChannelOptions& options) {
  const HilbertSpace joint = system_space().joined(bath.space());
  if (!options.evolve_bath_in_window) {
    // e^{L(t_n) dt} as a unitary sandwich with the interaction-picture fields
    // frozen at the slot time.
    Operator h_int = Operator::zero(joint);
    for (Axis a : {Axis::x, Axis::y, Axis::z}) {
      if (bath.field_is_zero(a)) continue;
      Operator s_a(system_space(), 0.5 * pauli(a));
      h_int += tensor(s_a, bath.field_at(a, config.time));
    }
    return HermitianEigen(h_int).unitary(config.delta_t).matrix();
  }
  // Interaction-picture window propagator with the bath Hamiltonian kept on:
  // (1 (x) e^{iH_B(t+dt)}) e^{-iH dt} (1 (x) e^{-iH_B t}), H = 1(x)H_B + V.
  Operator h_joint = tensor(Operator::identity(system_space()), bath.hamiltonian());
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    if (bath.field_is_zero(a)) continue;
    Operator s_a(system_space(), 0.5 * pauli(a));
    h_joint += tensor(s_a, bath.field_op(a));
  }
  const Eigen::MatrixXcd mid = HermitianEigen(h_joint).unitary(config.delta_t).matrix();
  const Eigen::MatrixXcd pre = bath.eig().unitary(config.time).matrix();           // e^{-iH_B t}
  const Eigen::MatrixXcd post =
      bath.eig().unitary(-(config.time + config.delta_t)).matrix();                // e^{+iH_B(t+dt)}
  const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
  return kron(id2, post) * mid * kron(id2, pre);
}

BathChannel kraus_exact(const MeasurementConfig& config, const BathModel& bath,
                        const ChannelOptions& options, int lambda) {
  const int d = bath.dim();
  const Eigen::MatrixXcd u = exact_window_unitary(config, bath, options);
  // Pure preparation: one Kraus operator per outcome.
  const Eigen::MatrixXcd k =
      joint_block(u, config.outcome_state(lambda), bloch_spinor(config.prep_bloch), d);
  // vec(K X K^dagger) = (conj(K) (x) K) vec(X).
  return BathChannel(bath.space(), kron(k.conjugate(), k));
}

BathChannel kraus_first_order(const MeasurementConfig& config, const BathModel& bath,
                              int lambda) {
  const int d = bath.dim();
  const Eigen::Vector2cd lam = config.outcome_state(lambda);
  const Eigen::Matrix2cd rho = config.prep_density();

  auto weight = [&](const Eigen::Matrix2cd& super_applied) {
    return (lam.adjoint() * super_applied * lam)(0, 0).real();
  };

  Eigen::MatrixXcd m = weight(rho) * Eigen::MatrixXcd::Identity(d * d, d * d);
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    if (bath.field_is_zero(a)) continue;
    const Eigen::Matrix2cd s = 0.5 * pauli(a);
    const Eigen::Matrix2cd s_plus_rho = 0.5 * (s * rho + rho * s);
    const Eigen::Matrix2cd s_minus_rho = cplx(0.0, -0.5) * (s * rho - rho * s);
    const Eigen::MatrixXcd b = bath.field_at(a, config.time).matrix();
    m += 2.0 * config.delta_t *
         (weight(s_plus_rho) * super_minus_matrix(b) + weight(s_minus_rho) * super_plus_matrix(b));
  }
  return BathChannel(bath.space(), std::move(m));
}

}  // namespace

KrausPair kraus_pair(const MeasurementConfig& config, const BathModel& bath,
                     const ChannelOptions& options) {
  if (options.mode == ChannelMode::exact_unitary)
    return KrausPair{kraus_exact(config, bath, options, +1),
                     kraus_exact(config, bath, options, -1)};
  return KrausPair{kraus_first_order(config, bath, +1), kraus_first_order(config, bath, -1)};
}

Eigen::MatrixXcd channel_choi(const BathChannel& channel) {
  const int d = channel.op_dim();
  Eigen::MatrixXcd choi = Eigen::MatrixXcd::Zero(d * d, d * d);
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      basis(a, b) = 1.0;
      const Eigen::VectorXcd out =
          channel.apply_vec(Eigen::Map<const Eigen::VectorXcd>(basis.data(), basis.size()));
      const Eigen::Map<const Eigen::MatrixXcd> block(out.data(), d, d);
      choi.block(a * d, b * d, d, d) = block;  // |a><b| (x) M(|a><b|)
      basis(a, b) = 0.0;
    }
  return choi;
}

double channel_trace_residue(const BathChannel& channel) {
  const int d = channel.op_dim();
  double worst = 0.0;
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      basis(a, b) = 1.0;
      const Eigen::VectorXcd out =
          channel.apply_vec(Eigen::Map<const Eigen::VectorXcd>(basis.data(), basis.size()));
      const cplx tr = vec_trace(out, d);
      worst = std::max(worst, std::abs(tr - (a == b ? cplx(1.0) : cplx(0.0))));
      basis(a, b) = 0.0;
    }
  return worst;
}

namespace {

void require_sorted_configs(const std::vector<MeasurementConfig>& configs) {
  if (configs.empty()) throw config_error("measurement: config list must be nonempty");
  for (std::size_t i = 1; i < configs.size(); ++i)
    if (!(configs[i - 1].time < configs[i].time))
      throw config_error("measurement: config times must be strictly increasing");
}

std::vector<KrausPair> build_pairs(const std::vector<MeasurementConfig>& configs,
                                   const BathModel& bath, const ChannelOptions& options) {
  std::vector<KrausPair> pairs;
  pairs.reserve(configs.size());
  for (const auto& c : configs) pairs.push_back(kraus_pair(c, bath, options));
  return pairs;
}

}  // namespace

std::map<std::vector<int>, double> joint_probabilities(
    const std::vector<MeasurementConfig>& configs, const BathModel& bath, const Operator& rho_b,
    const ChannelOptions& options) {
  require_sorted_configs(configs);
  const auto pairs = build_pairs(configs, bath, options);
  const int n = static_cast<int>(configs.size());

  std::map<std::vector<int>, double> probs;
  int clamped = 0;
  std::vector<int> outcome(n, +1);
  // DFS over the outcome tree, conditioning the (unnormalized) bath state.
  std::function<void(int, const Eigen::VectorXcd&)> walk = [&](int slot,
                                                               const Eigen::VectorXcd& state) {
    if (slot == n) {
      double p = vec_trace(state, bath.dim()).real();
      if (options.mode == ChannelMode::exact_unitary && p < -kDefaultTol)
        throw numeric_error("joint_probabilities: negative probability in exact mode");
      if (p < 0.0) {
        ++clamped;
        p = 0.0;
      }
      probs[outcome] = p;
      return;
    }
    for (int lambda : {+1, -1}) {
      outcome[slot] = lambda;
      walk(slot + 1, pairs[slot].outcome(lambda).apply_vec(state));
    }
    outcome[slot] = +1;
  };
  walk(0, vectorize(rho_b));

  double total = 0.0;
  for (const auto& [k, p] : probs) total += p;
  if (options.mode == ChannelMode::exact_unitary) {
    if (std::abs(total - 1.0) > 1e-9)
      throw numeric_error("joint_probabilities: outcome probabilities sum to " +
                          std::to_string(total) + ", expected 1");
  } else {
    if (clamped > 0)
      std::cerr << "qbath: warning: clamped " << clamped
                << " marginally negative first-order probabilities to 0\n";
    if (total > 0.0)
      for (auto& [k, p] : probs) p /= total;
  }
  return probs;
}

double exact_G(const std::vector<MeasurementConfig>& configs, const BathModel& bath,
               const Operator& rho_b, const ChannelOptions& options) {
  require_sorted_configs(configs);
  Eigen::VectorXcd state = vectorize(rho_b);
  for (const auto& c : configs) {
    const KrausPair pair = kraus_pair(c, bath, options);
    state = pair.difference().apply_vec(state);
  }
  return vec_trace(state, bath.dim()).real();
}

double decoherence_norm(const MeasurementConfig& config, const BathModel& bath,
                        const Operator& rho_b, const ChannelOptions& options) {
  const KrausPair pair = kraus_pair(config, bath, options);
  Operator diff = pair.total().apply(rho_b) - rho_b;
  // The difference of two Hermitian states is Hermitian; trace norm by
  // eigendecomposition.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff.matrix());
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

void ScheduleSpec::validate() const {
  if (!(tau > 0.0)) throw config_error("ScheduleSpec: tau must be > 0");
  if (pattern.empty()) throw config_error("ScheduleSpec: pattern must be nonempty");
  if (num_slots < 1) throw config_error("ScheduleSpec: num_slots must be >= 1");
  for (const auto& s : pattern)
    if (s.delta_t > tau)
      throw config_error("ScheduleSpec: tau must be >= delta_t of every slot");
}

MeasurementConfig ScheduleSpec::config_at(int k) const {
  const ScheduleSlot& t = slot_template(k);
  return MeasurementConfig(slot_time(k), t.prep, t.meas, t.delta_t);
}

std::vector<int> ScheduleSpec::used_offsets() const {
  std::vector<int> out;
  for (int j = 0; j < period(); ++j)
    if (pattern[j].used) out.push_back(j);
  return out;
}

std::uint64_t ScheduleSpec::hash() const {
  std::uint64_t h = fnv1a(&tau, sizeof(tau));
  h = fnv1a(&num_slots, sizeof(num_slots), h);
  for (const auto& s : pattern) {
    const std::uint8_t used = s.used ? 1 : 0;
    h = fnv1a(&used, 1, h);
    for (double v : {s.prep.x(), s.prep.y(), s.prep.z(), s.meas.x(), s.meas.y(), s.meas.z(),
                     s.delta_t})
      h = fnv1a(&v, sizeof(v), h);
  }
  return h;
}

namespace {

// One conditioned Bernoulli step; returns the sampled outcome and updates the
// normalized state in place.
int conditioned_step(Eigen::VectorXcd& state, const KrausPair& pair, double u, int dim) {
  Eigen::VectorXcd cand_plus = pair.plus.apply_vec(state);
  Eigen::VectorXcd cand_minus = pair.minus.apply_vec(state);
  double q_plus = vec_trace(cand_plus, dim).real();
  double q_minus = vec_trace(cand_minus, dim).real();
  // Both channel modes preserve the trace exactly; check drift before any
  // clamping so first-order O(dt^2) negativity is not mistaken for drift.
  if (std::abs(q_plus + q_minus - 1.0) > 1e-8)
    throw numeric_error("sample_records: conditioned-state trace drifted to " +
                        std::to_string(q_plus + q_minus));
  q_plus = std::max(q_plus, 0.0);
  q_minus = std::max(q_minus, 0.0);
  const double total = q_plus + q_minus;
  if (total <= 0.0)
    throw numeric_error("sample_records: zero-probability branch (numerical pathology)");
  const double p_plus = q_plus / total;
  if (u < p_plus) {
    state = cand_plus / q_plus;
    return +1;
  }
  if (q_minus <= 0.0) throw numeric_error("sample_records: zero-probability branch");
  state = cand_minus / q_minus;
  return -1;
}

}  // namespace

MeasurementRecord sample_records(const std::vector<MeasurementConfig>& configs,
                                 const BathModel& bath, const Operator& rho_b, int shots,
                                 std::uint64_t seed, const ChannelOptions& options) {
  require_sorted_configs(configs);
  if (shots < 1) throw config_error("sample_records: shots must be >= 1");
  const auto pairs = build_pairs(configs, bath, options);
  const int n = static_cast<int>(configs.size());
  const int dim = bath.dim();

  MeasurementRecord rec;
  rec.seed = seed;
  rec.mode = options.mode;
  rec.streaming = false;
  rec.num_slots = n;
  rec.period = n;
  rec.shots = shots;
  rec.used.assign(n, 1);
  for (const auto& c : configs) rec.slot_times.push_back(c.time);
  rec.outcomes.assign(static_cast<std::size_t>(shots) * n, 0);

  std::uint64_t h = 0;
  for (const auto& c : configs)
    for (double v :
         {c.time, c.prep_bloch.x(), c.prep_bloch.y(), c.prep_bloch.z(), c.measure_axis.x(),
          c.measure_axis.y(), c.measure_axis.z(), c.delta_t})
      h = fnv1a(&v, sizeof(v), h);
  rec.schedule_hash = h;

  const CounterRng rng(seed);
  const Eigen::VectorXcd initial = vectorize(rho_b);
  parallel_for(static_cast<std::size_t>(shots), [&](std::size_t shot) {
    Eigen::VectorXcd state = initial;
    for (int slot = 0; slot < n; ++slot) {
      const int lambda = conditioned_step(state, pairs[slot], rng.uniform(shot, slot), dim);
      rec.outcomes[shot * n + slot] = static_cast<std::int8_t>(lambda);
    }
  });
  return rec;
}

MeasurementRecord sample_records(const ScheduleSpec& schedule, const BathModel& bath,
                                 const Operator& rho_b, int shots, std::uint64_t seed,
                                 const ChannelOptions& options) {
  schedule.validate();
  if (shots < 1) throw config_error("sample_records: shots must be >= 1");
  const int n = schedule.num_slots;
  const int dim = bath.dim();

  std::vector<KrausPair> pairs;
  pairs.reserve(n);
  for (int k = 0; k < n; ++k) pairs.push_back(kraus_pair(schedule.config_at(k), bath, options));

  MeasurementRecord rec;
  rec.seed = seed;
  rec.mode = options.mode;
  rec.streaming = true;
  rec.schedule_hash = schedule.hash();
  rec.num_slots = n;
  rec.period = schedule.period();
  rec.shots = shots;
  rec.used.resize(n);
  for (int k = 0; k < n; ++k) {
    rec.used[k] = schedule.slot_template(k).used ? 1 : 0;
    rec.slot_times.push_back(schedule.slot_time(k));
  }
  rec.outcomes.assign(static_cast<std::size_t>(shots) * n, 0);

  const CounterRng rng(seed);
  const Eigen::VectorXcd initial = vectorize(rho_b);
  parallel_for(static_cast<std::size_t>(shots), [&](std::size_t traj) {
    Eigen::VectorXcd state = initial;
    for (int slot = 0; slot < n; ++slot) {
      // Idle slots are measured too; their outputs are simply never used.
      const int lambda = conditioned_step(state, pairs[slot], rng.uniform(traj, slot), dim);
      rec.outcomes[traj * static_cast<std::size_t>(n) + slot] =
          static_cast<std::int8_t>(lambda);
    }
  });
  return rec;
}

double streaming_exact_G(const ScheduleSpec& schedule, const BathModel& bath,
                         const Operator& rho_b, const ChannelOptions& options) {
  schedule.validate();
  const auto used = schedule.used_offsets();
  if (used.empty()) throw config_error("streaming_exact_G: schedule has no used slots");
  Eigen::VectorXcd state = vectorize(rho_b);
  for (int k = 0; k <= used.back(); ++k) {
    const KrausPair pair = kraus_pair(schedule.config_at(k), bath, options);
    state = (schedule.slot_template(k).used ? pair.difference() : pair.total())
                .apply_vec(state);
  }
  return vec_trace(state, bath.dim()).real();
}

std::vector<MeasurementConfig> schedule_unit_configs(const ScheduleSpec& schedule) {
  schedule.validate();
  std::vector<MeasurementConfig> configs;
  for (int j : schedule.used_offsets()) configs.push_back(schedule.config_at(j));
  return configs;
}

}  // namespace qbath
