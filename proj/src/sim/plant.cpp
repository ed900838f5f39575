#include "omninav/sim/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace omninav {

void SlipNoise::validate() const {
  if (sigma_x < 0.0 || sigma_y < 0.0 || sigma_theta < 0.0) {
    throw std::invalid_argument("SlipNoise: sigmas must be >= 0");
  }
}

Plant::Plant(const RobotGeometry& geometry, const Pose2D& start)
    : geometry_(geometry), state_{start, Velocity2D::local(0.0, 0.0, 0.0), 1.0, 1.0, 1.0} {
  geometry_.validate();
}

Plant::Outcome Plant::step(const Velocity2D& cmd, const WorldModel2D& world,
                           const SlipNoise& noise, RandomSource& rs) {
  cmd.require_frame(Frame::Local, "Plant::step");
  noise.validate();

  state_.commanded = cmd;
  state_.slip_x = noise.sigma_x > 0.0 ? rs.gaussian(1.0, noise.sigma_x) : 1.0;
  state_.slip_y = noise.sigma_y > 0.0 ? rs.gaussian(1.0, noise.sigma_y) : 1.0;
  state_.slip_theta = noise.sigma_theta > 0.0 ? rs.gaussian(1.0, noise.sigma_theta) : 1.0;

  const Velocity2D slipped = Velocity2D::local(
      cmd.vx * state_.slip_x, cmd.vy * state_.slip_y, cmd.omega * state_.slip_theta);
  const Pose2D next =
      integrate_odometry(state_.true_pose, local_to_global(slipped, state_.true_pose.theta));

  Outcome out;
  if (world.occupied_at(next.x, next.y)) {
    out.collided = true;
    out.collision_point = next.position();
    return out;  // halted: pose and encoder residues stay put
  }
  state_.true_pose = next;

  // Encoders measure the commanded wheel travel, not the slipped one.
  const WheelSpeeds travel = inverse_kinematics(geometry_, cmd);
  const double mpp = geometry_.meters_per_pulse();
  const double q[3] = {travel.q1, travel.q2, travel.q3};
  std::int32_t pulses[3];
  for (int i = 0; i < 3; ++i) {
    const double exact = q[i] / mpp + residue_[i];
    pulses[i] = static_cast<std::int32_t>(std::lround(exact));
    residue_[i] = exact - pulses[i];
  }
  out.encoders = {pulses[0], pulses[1], pulses[2]};
  return out;
}

}  // namespace omninav
