#include "omninav/sim/scenario.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "omninav/core/angle.hpp"

namespace omninav {

namespace {

Pose2D parse_pose(const std::string& key, const std::string& raw) {
  std::vector<double> parts;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("config: key " + key + " has a bad coordinate: " + item);
    }
  }
  if (parts.size() != 2 && parts.size() != 3) {
    throw std::invalid_argument("config: key " + key + " needs x,y or x,y,theta");
  }
  return {parts[0], parts[1], parts.size() == 3 ? parts[2] : 0.0};
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "world", "seed", "ticks", "dt",
      "start.x", "start.y", "start.theta",
      "visit",
      "localization",
      "slam.every", "slam.particles", "slam.logodds", "slam.l_occ", "slam.l_free",
      "slam.l_0", "slam.free_on_max_range", "slam.resolution", "slam.extent",
      "slam.alpha_slow", "slam.alpha_fast", "slam.omega_floor", "slam.drift_gamma",
      "slam.theta_eps", "slam.beam_stride", "slam.kmeans_k", "slam.kmeans_epochs",
      "slam.init",
      "motion.mean_offset_x", "motion.mean_offset_y", "motion.mean_offset_theta",
      "motion.sigma_x", "motion.sigma_y", "motion.sigma_theta",
      "lidar.beams", "lidar.range_min", "lidar.range_max", "lidar.sigma_range",
      "lidar.dropout_prob", "lidar.mount_rotation",
      "slip.sigma_x", "slip.sigma_y", "slip.sigma_theta",
      "robot.wheel_diameter", "robot.wheel_offset", "robot.mount_angle_deg",
      "robot.pulses_per_rev",
      "planner.k", "planner.delta_stop", "planner.delta_step", "planner.r_near",
      "planner.sample_margin", "planner.check_step", "planner.threshold",
      "planner.algo", "planner.backend", "planner.replan_period",
      "planner.blocked_range", "planner.inflation",
      "control.kp_xy", "control.kd_xy", "control.kp_theta", "control.kd_theta",
      "control.v_max", "control.omega_max", "control.arrival_tolerance",
  };
  return keys;
}

}  // namespace

Scenario Scenario::from_config(const KeyValueConfig& cfg,
                               const std::filesystem::path& base_dir) {
  for (const std::string& key : cfg.keys()) {
    if (key.rfind("room.", 0) == 0) continue;
    if (known_keys().count(key) == 0) {
      throw std::invalid_argument("config: unknown key " + key);
    }
  }

  Scenario s;
  std::filesystem::path world = cfg.get_string("world");
  s.world_file = world.is_absolute() ? world : base_dir / world;
  const std::string seed_raw = cfg.get_string("seed");
  // stoull silently accepts a sign, so insist on digits only.
  if (seed_raw.empty() || seed_raw.find_first_not_of("0123456789") != std::string::npos) {
    throw std::invalid_argument("config: seed must be a non-negative integer");
  }
  try {
    s.seed = std::stoull(seed_raw);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: seed must be a non-negative integer");
  }

  s.ticks = cfg.get_int("ticks", s.ticks);
  if (s.ticks < 1) throw std::invalid_argument("config: ticks must be >= 1");
  s.dt = cfg.get_double("dt", s.dt);
  if (!(s.dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");

  s.start = {cfg.get_double("start.x", 0.0), cfg.get_double("start.y", 0.0),
             cfg.get_double("start.theta", 0.0)};

  for (const std::string& key : cfg.keys()) {
    if (key.rfind("room.", 0) == 0) {
      s.rooms[key.substr(5)] = parse_pose(key, cfg.get_string(key));
    }
  }
  if (cfg.has("visit")) {
    std::stringstream ss(cfg.get_string("visit"));
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto from = name.find_first_not_of(" \t");
      const auto to = name.find_last_not_of(" \t");
      if (from == std::string::npos) continue;
      name = name.substr(from, to - from + 1);
      if (s.rooms.count(name) == 0) {
        throw std::invalid_argument("config: visit names undeclared room " + name);
      }
      s.visit.push_back(name);
    }
  }

  const std::string loc = cfg.get_string("localization", "slam");
  if (loc == "odometry") {
    s.localization = Localization::kOdometry;
  } else if (loc == "mcl") {
    s.localization = Localization::kMcl;
  } else if (loc == "slam") {
    s.localization = Localization::kSlam;
  } else {
    throw std::invalid_argument("config: localization must be odometry, mcl, or slam");
  }

  s.slam_every = cfg.get_int("slam.every", s.slam_every);
  if (s.slam_every < 1) throw std::invalid_argument("config: slam.every must be >= 1");
  s.particle_count = cfg.get_int("slam.particles", s.particle_count);
  if (s.particle_count < 1) {
    throw std::invalid_argument("config: slam.particles must be >= 1");
  }
  const std::string set = cfg.get_string("slam.logodds", "B");
  if (set == "A" || set == "a") {
    s.log_odds = LogOddsParams::set_a();
  } else if (set == "B" || set == "b") {
    s.log_odds = LogOddsParams::set_b();
  } else {
    throw std::invalid_argument("config: slam.logodds must be A or B");
  }
  s.log_odds.l_occ = cfg.get_double("slam.l_occ", s.log_odds.l_occ);
  s.log_odds.l_free = cfg.get_double("slam.l_free", s.log_odds.l_free);
  s.log_odds.l_0 = cfg.get_double("slam.l_0", s.log_odds.l_0);
  s.free_on_max_range = cfg.get_bool("slam.free_on_max_range", s.free_on_max_range);
  s.map_resolution = cfg.get_double("slam.resolution", s.map_resolution);
  s.map_extent = cfg.get_double("slam.extent", s.map_extent);
  const std::string init = cfg.get_string("slam.init", "start");
  if (init == "start") {
    s.particle_init = ParticleInit::kAtStart;
  } else if (init == "uniform") {
    s.particle_init = ParticleInit::kUniformFree;
  } else {
    throw std::invalid_argument("config: slam.init must be start or uniform");
  }

  s.filter.resample.alpha_slow = cfg.get_double("slam.alpha_slow", s.filter.resample.alpha_slow);
  s.filter.resample.alpha_fast = cfg.get_double("slam.alpha_fast", s.filter.resample.alpha_fast);
  s.filter.resample.omega_floor = cfg.get_double("slam.omega_floor", s.filter.resample.omega_floor);
  s.filter.resample.drift_gamma = cfg.get_double("slam.drift_gamma", s.filter.resample.drift_gamma);
  s.filter.resample.theta_eps = cfg.get_double("slam.theta_eps", s.filter.resample.theta_eps);
  s.filter.measurement.beam_stride = cfg.get_int("slam.beam_stride", s.filter.measurement.beam_stride);
  s.filter.cluster.k = cfg.get_int("slam.kmeans_k", s.filter.cluster.k);
  s.filter.cluster.epochs = cfg.get_int("slam.kmeans_epochs", s.filter.cluster.epochs);
  s.filter.motion.mean_offset_x = cfg.get_double("motion.mean_offset_x", s.filter.motion.mean_offset_x);
  s.filter.motion.mean_offset_y = cfg.get_double("motion.mean_offset_y", s.filter.motion.mean_offset_y);
  s.filter.motion.mean_offset_theta = cfg.get_double("motion.mean_offset_theta", s.filter.motion.mean_offset_theta);
  s.filter.motion.sigma_x = cfg.get_double("motion.sigma_x", s.filter.motion.sigma_x);
  s.filter.motion.sigma_y = cfg.get_double("motion.sigma_y", s.filter.motion.sigma_y);
  s.filter.motion.sigma_theta = cfg.get_double("motion.sigma_theta", s.filter.motion.sigma_theta);

  const int beams = cfg.get_int("lidar.beams", s.lidar.beam_count);
  if (beams < 1) throw std::invalid_argument("config: lidar.beams must be >= 1");
  s.lidar.beam_count = beams;
  s.lidar.angle_increment = kTwoPi / beams;
  s.lidar.range_min = cfg.get_double("lidar.range_min", s.lidar.range_min);
  s.lidar.range_max = cfg.get_double("lidar.range_max", s.lidar.range_max);
  s.lidar.sigma_range = cfg.get_double("lidar.sigma_range", s.lidar.sigma_range);
  s.lidar.dropout_prob = cfg.get_double("lidar.dropout_prob", s.lidar.dropout_prob);
  s.lidar.mount_rotation = cfg.get_double("lidar.mount_rotation", s.lidar.mount_rotation);

  s.slip.sigma_x = cfg.get_double("slip.sigma_x", s.slip.sigma_x);
  s.slip.sigma_y = cfg.get_double("slip.sigma_y", s.slip.sigma_y);
  s.slip.sigma_theta = cfg.get_double("slip.sigma_theta", s.slip.sigma_theta);

  s.robot.wheel_diameter = cfg.get_double("robot.wheel_diameter", s.robot.wheel_diameter);
  s.robot.wheel_offset = cfg.get_double("robot.wheel_offset", s.robot.wheel_offset);
  if (cfg.has("robot.mount_angle_deg")) {
    s.robot.mount_angle = deg_to_rad(cfg.get_double("robot.mount_angle_deg"));
  }
  s.robot.pulses_per_rev = cfg.get_int("robot.pulses_per_rev", s.robot.pulses_per_rev);

  s.planner.max_iterations = cfg.get_int("planner.k", s.planner.max_iterations);
  s.planner.delta_stop = cfg.get_double("planner.delta_stop", s.planner.delta_stop);
  s.planner.delta_step = cfg.get_double("planner.delta_step", s.planner.delta_step);
  s.planner.r_near = cfg.get_double("planner.r_near", s.planner.r_near);
  s.planner.sample_margin = cfg.get_double("planner.sample_margin", s.planner.sample_margin);
  s.planner.obstacle_check_step = cfg.get_double("planner.check_step", s.planner.obstacle_check_step);
  s.planner.occupancy_threshold = cfg.get_double("planner.threshold", s.planner.occupancy_threshold);
  const std::string algo = cfg.get_string("planner.algo", "rrt-star");
  if (algo == "rrt") {
    s.use_rrt_star = false;
  } else if (algo == "rrt-star") {
    s.use_rrt_star = true;
  } else {
    throw std::invalid_argument("config: planner.algo must be rrt or rrt-star");
  }
  const std::string backend = cfg.get_string("planner.backend", "kd");
  if (backend == "kd") {
    s.planner.backend = NearestBackend::kKdTree;
  } else if (backend == "linear") {
    s.planner.backend = NearestBackend::kLinear;
  } else {
    throw std::invalid_argument("config: planner.backend must be kd or linear");
  }
  s.replan_period = cfg.get_int("planner.replan_period", s.replan_period);
  if (s.replan_period < 1) {
    throw std::invalid_argument("config: planner.replan_period must be >= 1");
  }
  s.blocked_range = cfg.get_double("planner.blocked_range", s.blocked_range);
  s.planner_inflation = cfg.get_double("planner.inflation", s.planner_inflation);
  if (!(s.planner_inflation >= 0.0)) {
    throw std::invalid_argument("config: planner.inflation must be >= 0");
  }

  s.gains.kp_xy = cfg.get_double("control.kp_xy", s.gains.kp_xy);
  s.gains.kd_xy = cfg.get_double("control.kd_xy", s.gains.kd_xy);
  s.gains.kp_theta = cfg.get_double("control.kp_theta", s.gains.kp_theta);
  s.gains.kd_theta = cfg.get_double("control.kd_theta", s.gains.kd_theta);
  s.gains.v_max = cfg.get_double("control.v_max", s.gains.v_max);
  s.gains.omega_max = cfg.get_double("control.omega_max", s.gains.omega_max);
  s.arrival_tolerance = cfg.get_double("control.arrival_tolerance", s.arrival_tolerance);

  s.robot.validate();
  s.lidar.validate();
  s.slip.validate();
  s.filter.motion.validate();
  s.filter.resample.validate();
  s.filter.measurement.validate();
  s.planner.validate();
  s.gains.validate();
  return s;
}

Scenario Scenario::from_file(const std::filesystem::path& file) {
  return from_config(KeyValueConfig::from_file(file), file.parent_path());
}

void Scenario::validate_against(const WorldModel2D& world) const {
  if (world.occupied_at(start.x, start.y)) {
    throw std::invalid_argument("scenario: start pose is inside an obstacle");
  }
  if (start.x < 0.0 || start.y < 0.0 || start.x > world.extent_x() ||
      start.y > world.extent_y()) {
    throw std::invalid_argument("scenario: start pose is outside the world");
  }
}

}  // namespace omninav
