#include "omninav/control/behavior.hpp"

namespace omninav {

std::string to_string(BehaviorMode mode) {
  return mode == BehaviorMode::kEscorting ? "escorting" : "homing";
}

BehaviorAction fsm_step(BehaviorState& b, const BehaviorEvent& event,
                        const OccupancyGrid& map, double occupancy_threshold) {
  BehaviorAction action;
  switch (event.type) {
    case BehaviorEvent::Type::kGoalRequested:
      if (b.mode != BehaviorMode::kHoming) break;  // mid-escort requests are ignored
      if (map.occupancy_at(event.goal.position()) >= occupancy_threshold) {
        action.type = BehaviorAction::Type::kRejectGoal;
        break;
      }
      b.mode = BehaviorMode::kEscorting;
      b.goal_pos = event.goal;
      action.type = BehaviorAction::Type::kMoveTo;
      action.target = event.goal;
      break;
    case BehaviorEvent::Type::kArrivedAtGoal:
      if (b.mode != BehaviorMode::kEscorting) break;
      b.mode = BehaviorMode::kHoming;
      b.goal_pos.reset();
      action.type = BehaviorAction::Type::kMoveTo;
      action.target = b.init_pos;
      break;
    case BehaviorEvent::Type::kArrivedAtInit:
    case BehaviorEvent::Type::kNone:
      break;
  }
  return action;
}

BehaviorEvent detect_arrival(const BehaviorState& b, const Pose2D& pose) {
  if (b.mode == BehaviorMode::kEscorting && b.goal_pos &&
      distance(pose.position(), b.goal_pos->position()) <= b.arrival_tolerance) {
    return BehaviorEvent::arrived_at_goal();
  }
  if (b.mode == BehaviorMode::kHoming &&
      distance(pose.position(), b.init_pos.position()) <= b.arrival_tolerance) {
    return BehaviorEvent::arrived_at_init();
  }
  return BehaviorEvent::none();
}

}  // namespace omninav
