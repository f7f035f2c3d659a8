#pragma once

#include <cstdint>

namespace qbath {

// Counter-based splittable generator in the splitmix64 family: the stream for
// a (seed, shot) pair is keyed by one splitmix64 jump, and each slot draws an
// independent word from that stream. Stateless, so shots can be generated in
// parallel and any (shot, slot) value can be reproduced in isolation.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t word(std::uint64_t shot, std::uint64_t slot) const {
    const std::uint64_t stream = mix(seed_ + kGolden * (shot + 1));
    return mix(stream + kGolden * (slot + 1));
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform(std::uint64_t shot, std::uint64_t slot) const {
    return static_cast<double>(word(shot, slot) >> 11) * 0x1.0p-53;
  }

private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
};

}  // namespace qbath
