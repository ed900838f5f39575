#pragma once

#include <array>
#include <cstdint>

#include "omninav/core/types.hpp"

namespace omninav {

using Vec3 = std::array<double, 3>;

// Minimal fixed-size 3x3 matrix, row-major. This is all the linear algebra
// the wheel model needs; no general-purpose library is pulled in for it.
struct Mat3 {
  std::array<double, 9> m{};

  double at(int r, int c) const { return m[static_cast<std::size_t>(r * 3 + c)]; }
  double& at(int r, int c) { return m[static_cast<std::size_t>(r * 3 + c)]; }

  double det() const;
  // Adjugate inverse. Throws std::domain_error if |det| < 1e-9.
  Mat3 inverse() const;
  Vec3 mul(const Vec3& v) const;
};

// Three-wheel omnidirectional base, 90-degree Swedish wheels at 120-degree
// spacing. wheel_diameter in meters, wheel_offset = center-to-wheel distance,
// mount_angle = orientation of the first wheel, pulses_per_rev = encoder
// resolution.
struct RobotGeometry {
  double wheel_diameter = 0.10;
  double wheel_offset = 0.2;
  double mount_angle = deg_to_rad(30.0);
  int pulses_per_rev = 500;

  // Throws std::invalid_argument on non-positive dimensions/resolution.
  void validate() const;

  // Meters of wheel travel per encoder pulse.
  double meters_per_pulse() const;
};

// Signed encoder pulse counts accumulated over one tick.
struct EncoderSample {
  std::int32_t xi1 = 0;
  std::int32_t xi2 = 0;
  std::int32_t xi3 = 0;
};

// Linear wheel speeds, meters per tick.
struct WheelSpeeds {
  double q1 = 0.0;
  double q2 = 0.0;
  double q3 = 0.0;
};

// Wheel coupling matrix, wheel_speeds = B * [vx, vy, w]. Rows are
// [cos a, sin a, L], [-cos a, sin a, L], [0, -1, L] for mount angle a and
// offset L: two mirrored front wheels plus one rear wheel pointing along -y.
// Throws std::invalid_argument if the configuration is singular (det
// = 2 L cos(a) (1 + sin(a)), which vanishes at a = 90 deg).
Mat3 build_b_matrix(const RobotGeometry& g);

// Caches B and its inverse once; use this on hot paths.
class OmniKinematics {
 public:
  explicit OmniKinematics(const RobotGeometry& g);

  const RobotGeometry& geometry() const { return geometry_; }
  const Mat3& b_matrix() const { return b_; }

  WheelSpeeds wheel_speeds_from_encoders(const EncoderSample& e) const;
  WheelSpeeds inverse(const Velocity2D& local) const;
  Velocity2D forward(const WheelSpeeds& q) const;

 private:
  RobotGeometry geometry_;
  Mat3 b_;
  Mat3 b_inv_;
};

WheelSpeeds encoder_to_wheel_speed(const RobotGeometry& g, const EncoderSample& e);
WheelSpeeds inverse_kinematics(const RobotGeometry& g, const Velocity2D& local);
Velocity2D forward_kinematics(const RobotGeometry& g, const WheelSpeeds& q);

// Rotates a local-frame twist into the global frame using the heading the
// robot had at the start of the tick.
Velocity2D local_to_global(const Velocity2D& local, double theta_prev);
Velocity2D global_to_local(const Velocity2D& global, double theta);

// One-tick dead-reckoning update: pose + per-tick global displacement.
Pose2D integrate_odometry(const Pose2D& pose, const Velocity2D& global);

}  // namespace omninav
