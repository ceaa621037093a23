#pragma once

#include <cstdint>

#include "pursuit/linalg.hpp"

namespace pursuit {

/// Deterministic splitmix64 stream. All randomness in the simulator flows
/// through this generator so runs are bit-reproducible across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform in the solid ball via rejection from the bounding cube.
  Vec3 in_ball(const Vec3& center, double radius) {
    while (true) {
      const Vec3 u(uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0));
      if (u.squaredNorm() <= 1.0) return center + radius * u;
    }
  }

  /// Independent child stream for sub-run `index` of a campaign.
  static std::uint64_t derive(std::uint64_t master, std::uint64_t index) {
    Rng mix(master ^ (0x6a09e667f3bcc909ull + index * 0x3c6ef372fe94f82bull));
    return mix.next_u64();
  }

 private:
  std::uint64_t state_;
};

}  // namespace pursuit
