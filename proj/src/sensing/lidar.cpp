#include "omninav/sensing/lidar.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "omninav/core/angle.hpp"

namespace omninav {

void LidarConfig::validate() const {
  if (beam_count < 1) {
    throw std::invalid_argument("LidarConfig: beam_count must be >= 1");
  }
  if (!(angle_increment > 0.0)) {
    throw std::invalid_argument("LidarConfig: angle_increment must be > 0");
  }
  if (range_min < 0.0 || !(range_max > range_min)) {
    throw std::invalid_argument("LidarConfig: need 0 <= range_min < range_max");
  }
  if (sigma_range < 0.0) {
    throw std::invalid_argument("LidarConfig: sigma_range must be >= 0");
  }
  if (dropout_prob < 0.0 || dropout_prob > 1.0) {
    throw std::invalid_argument("LidarConfig: dropout_prob must be in [0, 1]");
  }
}

Point2D polar_to_point(double l, double phi) {
  if (l < 0.0) {
    throw std::domain_error("polar_to_point: negative range");
  }
  return {l * std::cos(phi), l * std::sin(phi)};
}

Point2D apply_mount_rotation(const Point2D& pt, double phi_mount) {
  const double c = std::cos(phi_mount);
  const double s = std::sin(phi_mount);
  return {c * pt.x - s * pt.y, s * pt.x + c * pt.y};
}

LidarScan simulate_scan(const WorldModel2D& world, const Pose2D& true_pose,
                        const LidarConfig& config, RandomSource& rs) {
  config.validate();
  if (!world.in_bounds(true_pose.x, true_pose.y)) {
    throw std::runtime_error("simulate_scan: pose outside world extent");
  }

  const double dl = config.ray_step > 0.0 ? config.ray_step : world.resolution() / 2.0;
  const auto steps = static_cast<long>(std::floor(config.range_max / dl));

  LidarScan scan;
  scan.range_min = config.range_min;
  scan.range_max = config.range_max;
  scan.mount_rotation = config.mount_rotation;
  scan.beams.reserve(static_cast<std::size_t>(config.beam_count));

  for (int n = 0; n < config.beam_count; ++n) {
    const double phi = config.angle_min + n * config.angle_increment;
    const double world_angle = true_pose.theta + config.mount_rotation + phi;
    const double cx = std::cos(world_angle);
    const double cy = std::sin(world_angle);

    bool hit = false;
    double range = config.range_max;
    for (long i = 0; i <= steps; ++i) {
      const double l = static_cast<double>(i) * dl;
      if (world.occupied_at(true_pose.x + l * cx, true_pose.y + l * cy)) {
        hit = true;
        range = l;
        break;
      }
    }

    bool dropout = false;
    if (config.dropout_prob > 0.0) {
      dropout = rs.uniform_double() < config.dropout_prob;
    }
    if (dropout) {
      range = config.range_max;
    } else if (hit && config.sigma_range > 0.0) {
      range += rs.gaussian(0.0, config.sigma_range);
    }
    range = std::clamp(range, config.range_min, config.range_max);
    scan.beams.push_back({range, phi});
  }
  return scan;
}

}  // namespace omninav
