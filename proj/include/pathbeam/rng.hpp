#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace pathbeam {

/// Deterministic pseudorandom source. Wraps std::mt19937_64 (whose output
/// sequence is fixed by the standard) and maps raw 64-bit draws to doubles
/// itself, so identical seeds give bitwise-identical streams on every
/// platform. Distribution objects from <random> are deliberately not used:
/// their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform angle on [0, 2*pi).
  double angle() { return 2.0 * M_PI * uniform(); }

  /// Unit-modulus complex number with uniform phase.
  std::complex<double> phasor() {
    const double a = angle();
    return {std::cos(a), std::sin(a)};
  }

  /// Standard real Gaussian via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  /// Circularly-symmetric complex Gaussian, unit variance (E|z|^2 = 1).
  std::complex<double> cgaussian() {
    return {gaussian() * M_SQRT1_2, gaussian() * M_SQRT1_2};
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// splitmix64 finalizer; used to decorrelate composed seed parts.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives one child seed from an ordered list of parts (master seed, trial
/// index, ...). Order matters; collisions between distinct part lists are
/// as unlikely as 64-bit hash collisions.
inline std::uint64_t seed_mix(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

}  // namespace pathbeam
