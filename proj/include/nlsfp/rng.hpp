#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace nlsfp {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so concurrent consumers stay deterministic
// under any scheduling as long as they own distinct (stream, counter) pairs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  static std::uint64_t stream_of(std::string_view label) {
    // FNV-1a
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : label) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    return mix(seed_ ^ mix(stream ^ mix(counter + 0x9e3779b97f4a7c15ull)));
  }

  /// Uniform in [0,1).
  double uniform(std::uint64_t stream, std::uint64_t counter) const {
    return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
  }

  /// Standard normal (Box-Muller on counters 2i, 2i+1).
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    const double u1 = uniform(stream, 2 * counter);
    const double u2 = uniform(stream, 2 * counter + 1);
    const double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-60));
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace nlsfp
