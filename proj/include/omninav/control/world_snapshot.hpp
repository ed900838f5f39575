#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "omninav/core/angle.hpp"
#include "omninav/core/types.hpp"
#include "omninav/mapping/occupancy_grid.hpp"

namespace omninav {

// Aggregated world state published each tick: the estimated pose (heading
// mirrored in degrees) plus a read-only view of the current map.
struct WorldSnapshot {
  Pose2D pose;
  double theta_deg = 0.0;
  const OccupancyGrid* map = nullptr;
  std::uint64_t tick = 0;

  static WorldSnapshot make(const Pose2D& pose, const OccupancyGrid* map,
                            std::uint64_t tick) {
    return {pose, rad_to_deg(pose.theta), map, tick};
  }

  void validate() const {
    if (std::abs(theta_deg - rad_to_deg(pose.theta)) > 1e-9) {
      throw std::logic_error("WorldSnapshot: degree and radian headings disagree");
    }
  }
};

}  // namespace omninav
