#pragma once

#include <cstdint>
#include <random>

namespace graspkit {

// Seeded RNG with hand-rolled value mappings. mt19937_64 output is bit-exact
// per the standard; avoiding std distribution objects keeps sampled sequences
// identical across standard library implementations, which the determinism
// contracts (goldens, byte-identical outputs) rely on.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Standard normal deviate (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace graspkit
