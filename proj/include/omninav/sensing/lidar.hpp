#pragma once

#include <vector>

#include "omninav/core/random.hpp"
#include "omninav/core/types.hpp"
#include "omninav/sensing/world_model.hpp"

namespace omninav {

struct LidarBeam {
  double range = 0.0;  // meters, clamped to [range_min, range_max]
  double angle = 0.0;  // radians, sensor-relative
};

struct LidarScan {
  std::vector<LidarBeam> beams;  // angles strictly increasing
  double range_min = 0.15;
  double range_max = 12.0;
  double mount_rotation = 0.0;  // sensor frame vs robot frame
};

struct LidarConfig {
  int beam_count = 360;
  double angle_min = 0.0;
  double angle_increment = deg_to_rad(1.0);
  double range_min = 0.15;
  double range_max = 12.0;
  double mount_rotation = 0.0;
  double sigma_range = 0.01;   // Gaussian noise on hit ranges, meters
  double dropout_prob = 0.0;   // per-beam chance of returning range_max
  double ray_step = 0.0;       // march step; <= 0 means world resolution / 2

  void validate() const;
};

// x = l cos(phi), y = l sin(phi). Throws std::domain_error for l < 0.
Point2D polar_to_point(double l, double phi);

// Rotates a sensor-frame point by the sensor mount angle.
Point2D apply_mount_rotation(const Point2D& pt, double phi_mount);

// Synthesizes a scan by grid-marching each beam from the true pose until the
// first occupied world cell. Beam n points at world angle
// pose.theta + mount_rotation + angle_min + n * angle_increment. Draw order
// per beam: dropout coin (only when dropout_prob > 0), then range noise (only
// for hit beams when sigma_range > 0); misses return exactly range_max.
// Throws std::runtime_error if the pose is outside the world extent.
LidarScan simulate_scan(const WorldModel2D& world, const Pose2D& true_pose,
                        const LidarConfig& config, RandomSource& rs);

}  // namespace omninav
