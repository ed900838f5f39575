#pragma once

#include <cstddef>
#include <cstdint>

namespace omninav {

// Seeded deterministic RNG (PCG32). Identical (seed, stream) pairs produce
// identical draw sequences across runs; the integer and uniform layers are
// also bit-exact across platforms. std:: engines/distributions are avoided
// on purpose: their outputs are not portable across standard libraries.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform double in [0, 1), 53-bit resolution.
  double uniform_double();

  // Uniform double in [lo, hi); lo == hi returns lo exactly.
  // Throws std::domain_error if lo > hi or either bound is non-finite.
  double uniform(double lo, double hi);

  // Uniform index in [0, n). Throws std::domain_error if n == 0.
  std::size_t uniform_index(std::size_t n);

  // Gaussian draw via Box-Muller (trig form, no caching: always exactly two
  // uniform draws per sample). sigma == 0 returns mean and consumes nothing.
  // Throws std::domain_error if sigma < 0 or inputs are non-finite.
  double gaussian(double mean, double sigma);

  // Derives an independent child seed; used to give subsystems their own
  // streams so draw counts in one never shift another.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t salt);

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

}  // namespace omninav
