#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "omninav/control/pd_controller.hpp"
#include "omninav/kinematics/kinematics.hpp"
#include "omninav/localization/particle_filter.hpp"
#include "omninav/mapping/occupancy_grid.hpp"
#include "omninav/planning/rrt.hpp"
#include "omninav/sensing/lidar.hpp"
#include "omninav/sim/config.hpp"
#include "omninav/sim/plant.hpp"

namespace omninav {

// Everything a headless run needs, assembled from a flat config file. All
// randomness stems from `seed`; there is no wall-clock entropy anywhere.
struct Scenario {
  enum class Localization { kOdometry, kMcl, kSlam };
  enum class ParticleInit { kAtStart, kUniformFree };

  std::filesystem::path world_file;
  Pose2D start;
  std::map<std::string, Pose2D> rooms;
  std::vector<std::string> visit;  // escorted in order, homing in between

  std::uint64_t seed = 0;
  int ticks = 4000;
  double dt = 0.05;

  Localization localization = Localization::kSlam;
  ParticleInit particle_init = ParticleInit::kAtStart;
  int slam_every = 5;
  int particle_count = 625;
  double map_resolution = 0.1;
  double map_extent = 8.0;  // initial learned-grid size; grows on demand
  LogOddsParams log_odds = LogOddsParams::set_b();
  bool free_on_max_range = false;

  RobotGeometry robot;
  LidarConfig lidar;
  SlipNoise slip;
  FilterParams filter;

  PlannerParams planner;
  bool use_rrt_star = true;
  int replan_period = 40;
  double blocked_range = 0.3;
  // Occupied cells are dilated by this radius (meters) on the copy of the
  // map handed to the planner, keeping paths off walls and door frames.
  double planner_inflation = 0.15;

  PdGains gains;
  double arrival_tolerance = 0.15;

  // Throws std::invalid_argument on missing mandatory keys (world, seed),
  // malformed values, unknown keys, or visits to undeclared rooms. Relative
  // world paths resolve against base_dir.
  static Scenario from_config(const KeyValueConfig& cfg,
                              const std::filesystem::path& base_dir);
  static Scenario from_file(const std::filesystem::path& file);

  // Checks the start pose against the loaded world.
  void validate_against(const WorldModel2D& world) const;
};

}  // namespace omninav
