#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace supq {

// Counter-based splitmix64 stream. Chosen over <random> engines so that a
// fixed seed yields the same draws on every standard library; CLI output is
// promised byte-identical for identical flags and seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Standard normal via Box-Muller; the partner draw is cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  std::complex<double> gaussian_complex() {
    double re = gaussian();
    double im = gaussian();
    return {re, im};
  }

private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

} // namespace supq
