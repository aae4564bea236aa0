#pragma once

#include <cstdint>
#include <random>

namespace dpi {

// Deterministic RNG. The engine is std::mt19937_64 (bit-exact by the
// standard); the output transforms below are pinned here instead of using
// std::*_distribution, whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller; consumes exactly two uniforms per pair of normals.
  double normal(double mean = 0.0, double sigma = 1.0);

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform index in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
  }

  // Mixes (seed, tag) into an independent child seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag);

  Rng child(std::uint64_t tag) { return Rng(derive(next_u64(), tag)); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dpi
