#pragma once

#include <filesystem>
#include <vector>

#include "omninav/core/types.hpp"
#include "omninav/sim/scenario.hpp"

namespace omninav {

struct MetricsReport {
  Pose2D final_true;
  Pose2D final_odom;
  Pose2D final_est;
  double odom_error = 0.0;  // Euclidean xy distance truth vs dead reckoning
  double est_error = 0.0;   // Euclidean xy distance truth vs published pose
  int ticks_run = 0;
  int goals_completed = 0;
  bool completed = false;  // every visit escorted and the robot re-homed
  bool timeout = false;    // tick budget exhausted first
  bool collided = false;   // plant halted on a wall cell
  int plans = 0;
  int planner_errors = 0;
  // Wall-clock per plan call; reported on stdout only, never in artifacts.
  std::vector<double> plan_times_ms;
  // Learned-map quality against the ground-truth world; -1 outside SLAM mode.
  double map_coverage = -1.0;
  double map_f1 = -1.0;
};

// Runs the scenario tick pipeline (sense -> localize -> behave -> plan ->
// follow -> actuate) over the topic bus. With a non-empty out_dir the run
// writes map.pgm, trajectory.csv, particles.csv, tree.csv, path.csv,
// snapshots.jsonl, and metrics.json there (directories are created).
MetricsReport run_scenario(const Scenario& scenario,
                           const std::filesystem::path& out_dir = {});

}  // namespace omninav
