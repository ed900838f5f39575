#pragma once

#include "omninav/core/random.hpp"
#include "omninav/core/types.hpp"
#include "omninav/kinematics/kinematics.hpp"
#include "omninav/sensing/world_model.hpp"

namespace omninav {

// Multiplicative slip: each commanded axis is scaled by N(1, sigma) draws in
// x, y, theta order (sigma 0 draws nothing and scales by 1).
struct SlipNoise {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double sigma_theta = 0.0;

  void validate() const;
};

struct PlantState {
  Pose2D true_pose;
  Velocity2D commanded = Velocity2D::local(0.0, 0.0, 0.0);
  // Slip multipliers applied on the last step, kept for inspection.
  double slip_x = 1.0;
  double slip_y = 1.0;
  double slip_theta = 1.0;
};

// Ground-truth robot: integrates slip-perturbed commands, reports encoder
// pulses synthesized from the slip-free command (so dead reckoning drifts
// from the truth exactly by the slip). Fractional pulses carry over between
// ticks to keep quantization unbiased.
class Plant {
 public:
  Plant(const RobotGeometry& geometry, const Pose2D& start);

  const PlantState& state() const { return state_; }

  struct Outcome {
    EncoderSample encoders;
    bool collided = false;
    Point2D collision_point;  // attempted position when collided
  };

  // cmd is the per-tick local-frame displacement. A step that would land on
  // an occupied world cell does not move the robot and reports the collision
  // (encoders stay zero for that step).
  Outcome step(const Velocity2D& cmd, const WorldModel2D& world, const SlipNoise& noise,
               RandomSource& rs);

 private:
  RobotGeometry geometry_;
  PlantState state_;
  double residue_[3] = {0.0, 0.0, 0.0};
};

}  // namespace omninav
