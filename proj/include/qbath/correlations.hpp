#pragma once

#include <map>
#include <string>
#include <vector>

#include "qbath/bath.hpp"
#include "qbath/superop.hpp"

namespace qbath {

// One (axis, sign, time) leg of a time-ordered correlation, index 1 = earliest.
struct IndexEntry {
  Axis axis = Axis::z;
  SuperSign sign = SuperSign::plus;
  double time = 0.0;
};

bool operator==(const IndexEntry& a, const IndexEntry& b);

// Identifies one C^{eta_N..eta_1}_{alpha_N..alpha_1}(t_N,..,t_1). Times must
// be strictly increasing; coincident times are rejected rather than
// symmetrized (the protocol never needs them).
class CorrelationIndex {
public:
  explicit CorrelationIndex(std::vector<IndexEntry> entries);

  int order() const { return static_cast<int>(entries_.size()); }
  const std::vector<IndexEntry>& entries() const { return entries_; }
  const IndexEntry& latest() const { return entries_.back(); }

  // Sub-index at the given 0-based positions (must be ascending).
  CorrelationIndex subset(const std::vector<int>& positions) const;

  // Earliest-to-latest strings, e.g. axes "zzy", signs "++-".
  std::string axis_string() const;
  std::string sign_string() const;

  friend bool operator==(const CorrelationIndex& a, const CorrelationIndex& b) {
    return a.entries_ == b.entries_;
  }

private:
  std::vector<IndexEntry> entries_;
};

// Deterministic ordering for map keys: by order, then per entry
// (time, axis, sign).
struct CorrelationIndexLess {
  bool operator()(const CorrelationIndex& a, const CorrelationIndex& b) const;
};

enum class CorrelationSource { exact, reconstructed };

struct CorrelationValue {
  double value = 0.0;
  CorrelationSource source = CorrelationSource::exact;
  double stderror = 0.0;  // 0 unless reconstructed from sampled records
};

// Map CorrelationIndex -> real value with provenance.
class CorrelationTensor {
public:
  using Map = std::map<CorrelationIndex, CorrelationValue, CorrelationIndexLess>;

  void set(const CorrelationIndex& idx, CorrelationValue v) { values_[idx] = v; }
  void set_exact(const CorrelationIndex& idx, double v) {
    values_[idx] = CorrelationValue{v, CorrelationSource::exact, 0.0};
  }
  bool contains(const CorrelationIndex& idx) const { return values_.count(idx) != 0; }
  const CorrelationValue& at(const CorrelationIndex& idx) const;
  double value(const CorrelationIndex& idx) const { return at(idx).value; }
  std::size_t size() const { return values_.size(); }
  const Map& values() const { return values_; }

private:
  Map values_;
};

// Exact time-ordered bath correlation of the built bath in state rho_b:
// Tr[B^{eta_N}(t_N) ... B^{eta_1}(t_1) rho_b], earliest applied first.
// Throws numeric_error if the imaginary residue of the trace exceeds
// imag_tol (that signals an algebra bug, not roundoff).
double bath_correlation(const CorrelationIndex& idx, const BathModel& bath,
                        const Operator& rho_b, double imag_tol = kDefaultTol);

// Batch driver: every strictly increasing time tuple drawn from `grid`, every
// axis assignment from `axes`, every sign pattern, up to order n_max.
// Patterns with eta_N = minus are stored as exact zeros without computation.
CorrelationTensor correlations_up_to(const BathModel& bath, const Operator& rho_b, int n_max,
                                     const std::vector<double>& grid,
                                     const std::vector<Axis>& axes);

// Moments -> cumulants by the partition recursion: the cumulant is the moment
// minus the sum over all proper partitions of the index positions, each block
// keeping its internal time order. Requires every sub-correlation to be
// present in the input tensor.
CorrelationTensor cumulants_from_moments(const CorrelationTensor& moments);

enum class CorrelationKind { classical, quantum };

// quantum iff any leg carries a minus (commutator) superoperator.
CorrelationKind classify(const CorrelationIndex& idx);

// All partitions of {0,..,n-1} into unordered nonempty blocks; each block and
// the block list are in ascending position order. (Bell(n) entries; reference
// implementation, fine for n <= 6.)
std::vector<std::vector<std::vector<int>>> set_partitions(int n);

}  // namespace qbath
