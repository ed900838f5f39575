#pragma once

#include <optional>
#include <string>

#include "omninav/core/types.hpp"
#include "omninav/mapping/occupancy_grid.hpp"

namespace omninav {

enum class BehaviorMode { kEscorting, kHoming };

std::string to_string(BehaviorMode mode);

struct BehaviorState {
  BehaviorMode mode = BehaviorMode::kHoming;
  Pose2D init_pos;
  std::optional<Pose2D> goal_pos;  // set while escorting
  double arrival_tolerance = 0.15;
};

struct BehaviorEvent {
  enum class Type { kNone, kGoalRequested, kArrivedAtGoal, kArrivedAtInit };

  Type type = Type::kNone;
  Pose2D goal;  // meaningful for kGoalRequested only

  static BehaviorEvent none() { return {}; }
  static BehaviorEvent goal_requested(const Pose2D& g) {
    return {Type::kGoalRequested, g};
  }
  static BehaviorEvent arrived_at_goal() { return {Type::kArrivedAtGoal, {}}; }
  static BehaviorEvent arrived_at_init() { return {Type::kArrivedAtInit, {}}; }
};

struct BehaviorAction {
  enum class Type { kNone, kMoveTo, kRejectGoal };

  Type type = Type::kNone;
  Pose2D target;  // meaningful for kMoveTo only
};

// Two-state transition table:
//   (Homing, goal requested)  -> Escorting, move to the goal
//   (Escorting, arrived goal) -> Homing, move to the initial pose
// Every other (state, event) pair self-loops with no action. A requested goal
// on an occupied map cell is rejected without a state change.
BehaviorAction fsm_step(BehaviorState& b, const BehaviorEvent& event,
                        const OccupancyGrid& map, double occupancy_threshold = 0.65);

// Synthesizes the arrival event for the current target (goal while escorting,
// the initial pose while homing) from the Euclidean pose error.
BehaviorEvent detect_arrival(const BehaviorState& b, const Pose2D& pose);

}  // namespace omninav
