#pragma once

#include <string>
#include <vector>

#include "qbath/common.hpp"

namespace qbath {

struct SpaceFactor {
  std::string label;
  int dim = 2;
};

inline bool operator==(const SpaceFactor& a, const SpaceFactor& b) {
  return a.label == b.label && a.dim == b.dim;
}

// Labeled tensor-product space. Factor order is significant and fixed:
// the system factor comes first, bath factors after. The default-constructed
// space is the trivial scalar space (dim 1, no factors).
class HilbertSpace {
public:
  HilbertSpace() = default;
  explicit HilbertSpace(std::vector<SpaceFactor> factors);

  static HilbertSpace single(std::string label, int dim = 2);

  int dim() const { return dim_; }
  const std::vector<SpaceFactor>& factors() const { return factors_; }
  std::size_t num_factors() const { return factors_.size(); }

  bool has_label(const std::string& label) const;
  int factor_index(const std::string& label) const;  // throws config_error if unknown

  // Concatenation system-first; throws config_error on label collision.
  HilbertSpace joined(const HilbertSpace& other) const;

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
    return a.factors_ == b.factors_;
  }
  friend bool operator!=(const HilbertSpace& a, const HilbertSpace& b) { return !(a == b); }

private:
  std::vector<SpaceFactor> factors_;
  int dim_ = 1;
};

}  // namespace qbath
