#include "qbath/hilbert.hpp"

#include <set>

namespace qbath {

HilbertSpace::HilbertSpace(std::vector<SpaceFactor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  dim_ = 1;
  for (const auto& f : factors_) {
    if (f.dim < 2) throw config_error("HilbertSpace: factor '" + f.label + "' must have dim >= 2");
    if (!seen.insert(f.label).second)
      throw config_error("HilbertSpace: duplicate factor label '" + f.label + "'");
    dim_ *= f.dim;
  }
}

HilbertSpace HilbertSpace::single(std::string label, int dim) {
  return HilbertSpace({SpaceFactor{std::move(label), dim}});
}

bool HilbertSpace::has_label(const std::string& label) const {
  for (const auto& f : factors_)
    if (f.label == label) return true;
  return false;
}

int HilbertSpace::factor_index(const std::string& label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label == label) return static_cast<int>(i);
  throw config_error("HilbertSpace: unknown factor label '" + label + "'");
}

HilbertSpace HilbertSpace::joined(const HilbertSpace& other) const {
  std::vector<SpaceFactor> all = factors_;
  for (const auto& f : other.factors_) {
    if (has_label(f.label))
      throw config_error("HilbertSpace: label collision on '" + f.label + "'");
    all.push_back(f);
  }
  return HilbertSpace(std::move(all));
}

}  // namespace qbath
