#include "omninav/control/path_follower.hpp"

#include <algorithm>
#include <cmath>

#include "omninav/kinematics/kinematics.hpp"

namespace omninav {

FollowResult follow_path(const Path& path, const WorldSnapshot& snapshot,
                         FollowerState& state, const PdGains& gains,
                         double arrival_tolerance) {
  FollowResult result;
  if (path.waypoints.empty()) {
    state.primed = false;
    result.progress = FollowProgress::kNeedsPath;
    return result;
  }

  const Pose2D& pose = snapshot.pose;
  const std::size_t last = path.waypoints.size() - 1;
  state.waypoint = std::min(state.waypoint, last);
  while (state.waypoint < last &&
         distance(path.waypoints[state.waypoint], pose.position()) <= arrival_tolerance) {
    ++state.waypoint;
  }
  result.setpoint_index = state.waypoint;

  const Point2D target = path.waypoints[state.waypoint];
  const double dist = distance(target, pose.position());
  if (state.waypoint == last && dist <= arrival_tolerance) {
    state.primed = false;
    result.progress = FollowProgress::kComplete;
    return result;
  }

  PoseError error;
  error.x = target.x - pose.x;
  error.y = target.y - pose.y;
  error.theta = wrap_to_pi(std::atan2(error.y, error.x) - pose.theta);
  if (!state.primed) {
    state.prev_error = error;
    state.primed = true;
  }

  const Velocity2D u_global = pd_control(error, state.prev_error, gains);
  state.prev_error = error;

  Velocity2D u_local = global_to_local(u_global, pose.theta);
  u_local.vx = std::clamp(u_local.vx, -gains.v_max, gains.v_max);
  u_local.vy = std::clamp(u_local.vy, -gains.v_max, gains.v_max);
  u_local.omega = std::clamp(u_local.omega, -gains.omega_max, gains.omega_max);
  result.command = u_local;
  return result;
}

bool replan_policy(int ticks_since_plan, bool blocked_flag, int period) {
  return blocked_flag || ticks_since_plan >= period;
}

}  // namespace omninav
