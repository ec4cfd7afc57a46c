// Deterministic random streams for reproducible Monte Carlo campaigns.
// Substreams are derived by key rather than by draw order, so results do
// not depend on how work is scheduled across threads.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace risac {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  // Independent child stream identified by key; stable across runs.
  Rng derive(std::uint64_t key) const {
    return Rng(splitmix64(seed_ ^ splitmix64(key + 0x632be59bd9b4e019ULL)));
  }
  Rng derive(std::uint64_t a, std::uint64_t b) const { return derive(a).derive(b); }
  Rng derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return derive(a).derive(b).derive(c);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; implementation-independent so that
  // campaigns reproduce bit-exactly on any platform.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> cgaussian(double variance) {
    const double s = std::sqrt(variance * 0.5);
    return {s * gaussian(), s * gaussian()};
  }

  // Unit-modulus sample with uniform phase.
  std::complex<double> unit_phase() {
    const double a = 2.0 * M_PI * uniform();
    return {std::cos(a), std::sin(a)};
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace risac
