#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace omninav {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Wraps an angle into [0, 2*pi). Throws std::domain_error on non-finite input.
inline double normalize_angle(double a) {
  if (!std::isfinite(a)) {
    throw std::domain_error("normalize_angle: non-finite angle");
  }
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) {
    r += kTwoPi;
  }
  // fmod of a tiny negative can round back up to exactly 2*pi.
  if (r >= kTwoPi) {
    r = 0.0;
  }
  return r;
}

// Wraps an angle into (-pi, pi]. Used for heading errors.
inline double wrap_to_pi(double a) {
  double r = normalize_angle(a);
  return r > kPi ? r - kTwoPi : r;
}

}  // namespace omninav
