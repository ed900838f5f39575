#pragma once

#include <cstddef>

#include "omninav/control/pd_controller.hpp"
#include "omninav/control/world_snapshot.hpp"
#include "omninav/planning/rrt.hpp"

namespace omninav {

// Waypoint cursor plus the previous-tick error for the derivative term.
// Reset (or replace) whenever a new path arrives.
struct FollowerState {
  std::size_t waypoint = 0;
  PoseError prev_error;
  bool primed = false;  // first call copies the current error into prev
};

enum class FollowProgress { kInProgress, kComplete, kNeedsPath };

struct FollowResult {
  Velocity2D command = Velocity2D::local(0.0, 0.0, 0.0);
  FollowProgress progress = FollowProgress::kInProgress;
  std::size_t setpoint_index = 0;
};

// Drives toward the first path waypoint (from the cursor onward) farther than
// arrival_tolerance, heading setpoint facing the direction of travel. The PD
// command is computed on the global error, rotated into the robot frame, and
// clamped per component again after rotation. An empty path yields a zero
// command and kNeedsPath; all waypoints within tolerance yield a zero command
// and kComplete.
FollowResult follow_path(const Path& path, const WorldSnapshot& snapshot,
                         FollowerState& state, const PdGains& gains,
                         double arrival_tolerance = 0.15);

// True when a replan is due: the blocked flag is set or at least `period`
// ticks elapsed since the last plan.
bool replan_policy(int ticks_since_plan, bool blocked_flag, int period = 40);

}  // namespace omninav
