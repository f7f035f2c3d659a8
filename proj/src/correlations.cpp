#include "qbath/correlations.hpp"

#include <algorithm>
#include <cmath>

namespace qbath {

bool operator==(const IndexEntry& a, const IndexEntry& b) {
  return a.axis == b.axis && a.sign == b.sign && a.time == b.time;
}

CorrelationIndex::CorrelationIndex(std::vector<IndexEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw config_error("CorrelationIndex: order must be >= 1");
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (!(entries_[i - 1].time < entries_[i].time))
      throw config_error(
          "CorrelationIndex: times must be strictly increasing (coincident or unsorted "
          "times are rejected)");
  }
}

CorrelationIndex CorrelationIndex::subset(const std::vector<int>& positions) const {
  std::vector<IndexEntry> out;
  out.reserve(positions.size());
  int prev = -1;
  for (int p : positions) {
    if (p <= prev || p < 0 || p >= order())
      throw config_error("CorrelationIndex::subset: positions must be ascending and in range");
    out.push_back(entries_[p]);
    prev = p;
  }
  return CorrelationIndex(std::move(out));
}

std::string CorrelationIndex::axis_string() const {
  std::string s;
  for (const auto& e : entries_) s.push_back(axis_char(e.axis));
  return s;
}

std::string CorrelationIndex::sign_string() const {
  std::string s;
  for (const auto& e : entries_) s.push_back(sign_char(e.sign));
  return s;
}

bool CorrelationIndexLess::operator()(const CorrelationIndex& a,
                                      const CorrelationIndex& b) const {
  if (a.order() != b.order()) return a.order() < b.order();
  for (int i = 0; i < a.order(); ++i) {
    const auto& ea = a.entries()[i];
    const auto& eb = b.entries()[i];
    if (ea.time != eb.time) return ea.time < eb.time;
    if (ea.axis != eb.axis) return static_cast<int>(ea.axis) < static_cast<int>(eb.axis);
    if (ea.sign != eb.sign) return static_cast<int>(ea.sign) < static_cast<int>(eb.sign);
  }
  return false;
}

const CorrelationValue& CorrelationTensor::at(const CorrelationIndex& idx) const {
  auto it = values_.find(idx);
  if (it == values_.end())
    throw config_error("CorrelationTensor: missing entry C^{" + idx.sign_string() + "}_{" +
                       idx.axis_string() + "}");
  return it->second;
}

double bath_correlation(const CorrelationIndex& idx, const BathModel& bath,
                        const Operator& rho_b, double imag_tol) {
  if (rho_b.space() != bath.space())
    throw config_error("bath_correlation: state lives on a different space than the bath");
  Operator x = rho_b;
  for (const auto& e : idx.entries()) x = super_apply(e.sign, bath.field_at(e.axis, e.time), x);
  const cplx tr = x.trace();
  if (std::abs(tr.imag()) > imag_tol)
    throw numeric_error("bath_correlation: imaginary residue " + std::to_string(tr.imag()) +
                        " exceeds tolerance (algebra bug)");
  return tr.real();
}

namespace {

void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  if (k == 0) return;
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

CorrelationTensor correlations_up_to(const BathModel& bath, const Operator& rho_b, int n_max,
                                     const std::vector<double>& grid,
                                     const std::vector<Axis>& axes) {
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw config_error("correlations_up_to: time grid must be sorted");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] == grid[i - 1]) throw config_error("correlations_up_to: duplicate grid time");
  if (axes.empty()) throw config_error("correlations_up_to: axes must be nonempty");

  // Enumerate all indices first, then evaluate in parallel.
  std::vector<CorrelationIndex> computed;  // eta_N = plus
  std::vector<CorrelationIndex> null_sign;  // eta_N = minus, exact zeros
  const int t = static_cast<int>(grid.size());
  for (int n = 1; n <= n_max; ++n) {
    for_each_combination(t, n, [&](const std::vector<int>& times) {
      std::vector<int> choice(n, 0);  // combined axis+sign digit, base 2*axes
      const int base = 2 * static_cast<int>(axes.size());
      for (;;) {
        std::vector<IndexEntry> entries(n);
        for (int i = 0; i < n; ++i) {
          entries[i].time = grid[times[i]];
          entries[i].axis = axes[choice[i] / 2];
          entries[i].sign = (choice[i] % 2 == 0) ? SuperSign::plus : SuperSign::minus;
        }
        CorrelationIndex idx(std::move(entries));
        if (idx.latest().sign == SuperSign::plus)
          computed.push_back(std::move(idx));
        else
          null_sign.push_back(std::move(idx));
        int i = n - 1;
        while (i >= 0 && choice[i] == base - 1) choice[i--] = 0;
        if (i < 0) break;
        ++choice[i];
      }
    });
  }

  std::vector<double> results(computed.size());
  parallel_for(computed.size(),
               [&](std::size_t i) { results[i] = bath_correlation(computed[i], bath, rho_b); });

  CorrelationTensor tensor;
  for (std::size_t i = 0; i < computed.size(); ++i) tensor.set_exact(computed[i], results[i]);
  for (const auto& idx : null_sign) tensor.set_exact(idx, 0.0);
  return tensor;
}

std::vector<std::vector<std::vector<int>>> set_partitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  if (n <= 0) return out;
  // Restricted growth strings: rgs[i] <= 1 + max(rgs[0..i-1]).
  std::vector<int> rgs(n, 0);
  for (;;) {
    int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<std::vector<int>> part(blocks);
    for (int i = 0; i < n; ++i) part[rgs[i]].push_back(i);
    out.push_back(std::move(part));
    int i = n - 1;
    for (; i > 0; --i) {
      int maxPrev = *std::max_element(rgs.begin(), rgs.begin() + i);
      if (rgs[i] <= maxPrev) break;
    }
    if (i == 0) return out;
    ++rgs[i];
    std::fill(rgs.begin() + i + 1, rgs.end(), 0);
  }
}

CorrelationTensor cumulants_from_moments(const CorrelationTensor& moments) {
  CorrelationTensor cumulants;
  // Ascending order guarantees sub-cumulants exist before they are consumed;
  // the map ordering already sorts by order first.
  for (const auto& [idx, mv] : moments.values()) {
    const int n = idx.order();
    double value = mv.value;
    if (n > 1) {
      for (const auto& part : set_partitions(n)) {
        if (part.size() < 2) continue;  // the trivial partition is the moment itself
        double prod = 1.0;
        for (const auto& block : part) {
          const CorrelationIndex sub = idx.subset(block);
          prod *= cumulants.at(sub).value;  // throws if a sub-correlation is missing
        }
        value -= prod;
      }
    }
    CorrelationValue cv = mv;
    cv.value = value;
    cumulants.set(idx, cv);
  }
  return cumulants;
}

CorrelationKind classify(const CorrelationIndex& idx) {
  for (const auto& e : idx.entries())
    if (e.sign == SuperSign::minus) return CorrelationKind::quantum;
  return CorrelationKind::classical;
}

}  // namespace qbath
