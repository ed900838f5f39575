#include "omninav/kinematics/kinematics.hpp"

#include <cmath>
#include <stdexcept>

#include "omninav/core/angle.hpp"

namespace omninav {

double Mat3::det() const {
  return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
         at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
         at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
}

Mat3 Mat3::inverse() const {
  const double d = det();
  if (std::abs(d) < 1e-9) {
    throw std::domain_error("Mat3::inverse: singular matrix");
  }
  const double inv_d = 1.0 / d;
  Mat3 r;
  r.at(0, 0) = (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) * inv_d;
  r.at(0, 1) = (at(0, 2) * at(2, 1) - at(0, 1) * at(2, 2)) * inv_d;
  r.at(0, 2) = (at(0, 1) * at(1, 2) - at(0, 2) * at(1, 1)) * inv_d;
  r.at(1, 0) = (at(1, 2) * at(2, 0) - at(1, 0) * at(2, 2)) * inv_d;
  r.at(1, 1) = (at(0, 0) * at(2, 2) - at(0, 2) * at(2, 0)) * inv_d;
  r.at(1, 2) = (at(0, 2) * at(1, 0) - at(0, 0) * at(1, 2)) * inv_d;
  r.at(2, 0) = (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0)) * inv_d;
  r.at(2, 1) = (at(0, 1) * at(2, 0) - at(0, 0) * at(2, 1)) * inv_d;
  r.at(2, 2) = (at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0)) * inv_d;
  return r;
}

Vec3 Mat3::mul(const Vec3& v) const {
  return {at(0, 0) * v[0] + at(0, 1) * v[1] + at(0, 2) * v[2],
          at(1, 0) * v[0] + at(1, 1) * v[1] + at(1, 2) * v[2],
          at(2, 0) * v[0] + at(2, 1) * v[1] + at(2, 2) * v[2]};
}

void RobotGeometry::validate() const {
  if (!(wheel_diameter > 0.0)) {
    throw std::invalid_argument("RobotGeometry: wheel_diameter must be > 0");
  }
  if (!(wheel_offset > 0.0)) {
    throw std::invalid_argument("RobotGeometry: wheel_offset must be > 0");
  }
  if (pulses_per_rev <= 0) {
    throw std::invalid_argument("RobotGeometry: pulses_per_rev must be > 0");
  }
  if (!std::isfinite(mount_angle)) {
    throw std::invalid_argument("RobotGeometry: mount_angle must be finite");
  }
}

double RobotGeometry::meters_per_pulse() const {
  return kPi * wheel_diameter / static_cast<double>(pulses_per_rev);
}

Mat3 build_b_matrix(const RobotGeometry& g) {
  g.validate();
  const double c = std::cos(g.mount_angle);
  const double s = std::sin(g.mount_angle);
  const double L = g.wheel_offset;
  Mat3 b;
  b.m = {c, s, L, -c, s, L, 0.0, -1.0, L};
  if (std::abs(b.det()) < 1e-9) {
    throw std::invalid_argument("RobotGeometry: singular wheel configuration");
  }
  return b;
}

OmniKinematics::OmniKinematics(const RobotGeometry& g)
    : geometry_(g), b_(build_b_matrix(g)), b_inv_(b_.inverse()) {}

WheelSpeeds OmniKinematics::wheel_speeds_from_encoders(const EncoderSample& e) const {
  const double k = geometry_.meters_per_pulse();
  return {k * e.xi1, k * e.xi2, k * e.xi3};
}

WheelSpeeds OmniKinematics::inverse(const Velocity2D& local) const {
  local.require_frame(Frame::Local, "OmniKinematics::inverse");
  const Vec3 q = b_.mul({local.vx, local.vy, local.omega});
  return {q[0], q[1], q[2]};
}

Velocity2D OmniKinematics::forward(const WheelSpeeds& q) const {
  const Vec3 v = b_inv_.mul({q.q1, q.q2, q.q3});
  return Velocity2D::local(v[0], v[1], v[2]);
}

WheelSpeeds encoder_to_wheel_speed(const RobotGeometry& g, const EncoderSample& e) {
  g.validate();
  const double k = g.meters_per_pulse();
  return {k * e.xi1, k * e.xi2, k * e.xi3};
}

WheelSpeeds inverse_kinematics(const RobotGeometry& g, const Velocity2D& local) {
  return OmniKinematics(g).inverse(local);
}

Velocity2D forward_kinematics(const RobotGeometry& g, const WheelSpeeds& q) {
  return OmniKinematics(g).forward(q);
}

Velocity2D local_to_global(const Velocity2D& local, double theta_prev) {
  local.require_frame(Frame::Local, "local_to_global");
  const double c = std::cos(theta_prev);
  const double s = std::sin(theta_prev);
  return Velocity2D::global(c * local.vx - s * local.vy, s * local.vx + c * local.vy,
                            local.omega);
}

Velocity2D global_to_local(const Velocity2D& global, double theta) {
  global.require_frame(Frame::Global, "global_to_local");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Velocity2D::local(c * global.vx + s * global.vy, -s * global.vx + c * global.vy,
                           global.omega);
}

Pose2D integrate_odometry(const Pose2D& pose, const Velocity2D& global) {
  global.require_frame(Frame::Global, "integrate_odometry");
  return {pose.x + global.vx, pose.y + global.vy, pose.theta + global.omega};
}

}  // namespace omninav
