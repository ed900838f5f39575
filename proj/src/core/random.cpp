#include "omninav/core/random.hpp"

#include <cmath>
#include <stdexcept>

#include "omninav/core/angle.hpp"

namespace omninav {

namespace {
constexpr double kInv2p53 = 0x1.0p-53;
}

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : state_(0), inc_((stream << 1u) | 1u) {
  next_u32();
  state_ += seed;
  next_u32();
}

std::uint32_t RandomSource::next_u32() {
  const std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + inc_;
  const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const auto rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t RandomSource::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RandomSource::uniform_double() {
  return static_cast<double>(next_u64() >> 11) * kInv2p53;
}

double RandomSource::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    throw std::domain_error("RandomSource::uniform: invalid bounds");
  }
  if (lo == hi) {
    return lo;
  }
  const double r = lo + (hi - lo) * uniform_double();
  // Rounding can push the product to hi itself; keep the half-open contract.
  return r < hi ? r : std::nextafter(hi, lo);
}

std::size_t RandomSource::uniform_index(std::size_t n) {
  if (n == 0) {
    throw std::domain_error("RandomSource::uniform_index: empty range");
  }
  auto idx = static_cast<std::size_t>(uniform_double() * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

double RandomSource::gaussian(double mean, double sigma) {
  if (!std::isfinite(mean) || !std::isfinite(sigma) || sigma < 0.0) {
    throw std::domain_error("RandomSource::gaussian: invalid parameters");
  }
  if (sigma == 0.0) {
    return mean;
  }
  // u1 in (0, 1] so the log argument is never zero.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * kInv2p53;
  const double u2 = uniform_double();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  return mean + sigma * mag * std::cos(kTwoPi * u2);
}

std::uint64_t RandomSource::mix(std::uint64_t seed, std::uint64_t salt) {
  // splitmix64 finalizer over seed ^ golden-ratio-spread salt.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace omninav
