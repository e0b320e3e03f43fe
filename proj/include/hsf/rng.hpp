#pragma once

#include <cstdint>

namespace hsf {

/// SplitMix64: the 64-bit counter-based generator used for every seeded
/// construction in the library. State advances by a fixed odd constant and
/// the output is a bijective finalizer of the counter, so streams are
/// reproducible from the seed alone and cheap to fork.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [-1, 1).
  double next_sym() { return 2.0 * next_double() - 1.0; }

  /// Independent stream derived from this one (for per-object seeding).
  SplitMix64 fork() { return SplitMix64(next_u64()); }

 private:
  uint64_t state_;
};

}  // namespace hsf
