#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rflin/errors.hpp"

namespace rflin {

// splitmix64 finalizer. Used to turn (seed, stream id) pairs into well-mixed
// engine seeds so that sibling streams are statistically independent.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One named random stream. Every stochastic operation in the library takes an
// explicit stream, and substreams are derived by id rather than by sharing
// state, so results are replayable no matter how calls interleave.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : base_(seed), engine_(mix64(seed)) {}

  // Child stream identified by `id`; independent of any draws made so far.
  RngStream spawn(std::uint64_t id) const {
    return RngStream(mix64(base_ ^ mix64(id + 0x51ed2701ULL)));
  }

  std::uint64_t bits() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits. Hand-rolled so output does
  // not depend on the standard library's distribution implementation.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::int64_t below(std::int64_t n) {
    if (n <= 0) throw InvalidParameter("below() needs a positive bound");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::int64_t>(x % un);
  }

  // Standard normal via Box-Muller on our own uniforms.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint64_t base_seed() const { return base_; }

 private:
  std::uint64_t base_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rflin
