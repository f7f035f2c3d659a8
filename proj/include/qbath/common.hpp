#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace qbath {

using cplx = std::complex<double>;
inline constexpr cplx kImag{0.0, 1.0};

// Default absolute tolerance for Hermiticity / trace / residue checks.
inline constexpr double kDefaultTol = 1e-10;

// Thrown when an input violates a documented precondition (bad config,
// unsorted times, mismatched spaces, ...). CLI maps this to exit code 2.
class config_error : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical invariant that should hold by construction is
// violated (imaginary residue on a real quantity, negative probability mass,
// trace drift). CLI maps this to exit code 3.
class numeric_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// File / serialization failures. CLI maps this to exit code 4.
class io_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Runs fn(i) for i in [0, n). Honors the QBATH_THREADS environment variable
// (min 1); results must be written to disjoint slots by the caller so the
// outcome is independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Number of worker threads parallel_for would use.
unsigned thread_budget();

// FNV-1a, used for config/schedule fingerprints in manifests and records.
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const std::string& s);

}  // namespace qbath
