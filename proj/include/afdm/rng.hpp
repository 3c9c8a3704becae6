// rng.hpp - seeded random streams for Monte Carlo trials
//
// Every trial gets its own stream derived from (seed, experiment tag, trial
// index), so results do not depend on worker count or scheduling order.
// Gaussian samples come from an explicit Box-Muller so the produced sequences
// are pinned by this file, not by the standard library's distribution
// internals.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include "afdm/signal.hpp"

namespace afdm {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_str(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

// Derives a substream seed from a base seed plus a tag and index.
inline std::uint64_t substream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0) {
  std::uint64_t h = detail::splitmix64(seed);
  h = detail::splitmix64(h ^ detail::hash_str(tag));
  h = detail::splitmix64(h ^ index);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t bits() { return eng_(); }

  // Standard normal via Box-Muller.
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circular complex Gaussian with E|z|^2 = sigma2.
  cplx cgauss(double sigma2 = 1.0) {
    const double s = std::sqrt(sigma2 / 2.0);
    return {s * gauss(), s * gauss()};
  }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace afdm
