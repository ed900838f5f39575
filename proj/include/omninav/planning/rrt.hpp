#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "omninav/core/random.hpp"
#include "omninav/core/types.hpp"
#include "omninav/mapping/occupancy_grid.hpp"
#include "omninav/planning/kd_tree.hpp"

namespace omninav {

struct PlanNode {
  std::size_t id = 0;
  Point2D position;
  std::optional<std::size_t> parent;  // empty for the root
  double cost = 0.0;                  // path cost from the root, meters
};

enum class NearestBackend { kKdTree, kLinear };

struct PlannerParams {
  int max_iterations = 625;
  double delta_stop = 0.2;
  double delta_step = 1.0;
  double r_near = 1.5;
  double sample_margin = 1.0;
  // Segment sampling spacing for collision checks; <= 0 uses half the map
  // resolution.
  double obstacle_check_step = 0.0;
  double occupancy_threshold = 0.65;
  NearestBackend backend = NearestBackend::kKdTree;

  void validate() const;
};

struct Path {
  std::vector<Point2D> waypoints;  // start first, goal-side node last
  double length = 0.0;

  static double length_of(const std::vector<Point2D>& pts);
};

struct PlanResult {
  Path path;
  std::vector<PlanNode> tree;    // insertion order; node 0 is the root
  bool complete = false;         // a node ended within delta_stop of the goal
  int iterations = 0;            // loop iterations that drew a sample
  double elapsed_ms = 0.0;       // wall time; report only, never an artifact
  std::vector<Point2D> samples;  // every reference point drawn, kept or not
};

// True when every sample along a->b, spaced obstacle_check_step apart plus
// the endpoint, reads occupancy below occupancy_threshold (unknown cells are
// 0.5 and count as free).
bool obstacle_free(const OccupancyGrid& map, const Point2D& a, const Point2D& b,
                   const PlannerParams& params);

// Grows a tree from q_init by steering from the nearest node toward uniform
// samples over the start/goal bounding box (inflated by sample_margin), each
// step a uniform length in [delta_stop, delta_step]. Stops once any node is
// within delta_stop of q_goal or after max_iterations. The path backtracks
// parent links from the node nearest the goal down to the root, reversed to
// run start -> end; when no growth happened it is just [q_init]. Rejected
// samples count toward the iteration budget. Throws std::invalid_argument if
// q_init lies outside the map or on an occupied cell.
PlanResult plan_rrt(const OccupancyGrid& map, const Point2D& q_init, const Point2D& q_goal,
                    const PlannerParams& params, RandomSource& rs);

// plan_rrt plus parent re-selection: each new node adopts, among the tree
// nodes within r_near, the parent minimizing cost + segment length subject to
// obstacle_free. Node positions match plan_rrt draw for draw; only parents
// and costs differ.
PlanResult plan_rrt_star(const OccupancyGrid& map, const Point2D& q_init,
                         const Point2D& q_goal, const PlannerParams& params,
                         RandomSource& rs);

// "id,x,y,parent,cost" rows; the root's parent prints as -1.
void write_tree_csv(std::ostream& out, const std::vector<PlanNode>& tree);
// "x,y" waypoint rows.
void write_path_csv(std::ostream& out, const Path& path);

}  // namespace omninav
