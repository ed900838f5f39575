#include "omninav/sim/runner.hpp"

#include <any>
#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "omninav/control/behavior.hpp"
#include "omninav/control/path_follower.hpp"
#include "omninav/control/topic_bus.hpp"
#include "omninav/control/world_snapshot.hpp"
#include "omninav/core/format.hpp"

namespace omninav {

namespace {

// Ticks a fresh blocked flag must wait after a plan; stops a wall-hugging
// robot from replanning every tick.
constexpr int kBlockedCooldownTicks = 5;

Pose2D bridge_estimate(const Pose2D& base_est, const Pose2D& base_odom,
                       const Pose2D& odom) {
  const double dx = odom.x - base_odom.x;
  const double dy = odom.y - base_odom.y;
  const double ang = wrap_to_pi(base_est.theta - base_odom.theta);
  const double c = std::cos(ang), s = std::sin(ang);
  return {base_est.x + c * dx - s * dy, base_est.y + s * dx + c * dy,
          normalize_angle(base_est.theta + wrap_to_pi(odom.theta - base_odom.theta))};
}

void seed_particles_uniform(ParticleSet& ps, const OccupancyGrid& map, RandomSource& rs) {
  std::vector<Point2D> free_cells;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (log_odds_to_prob(map.log_odds_cell({c, r})) < 0.35) {
        free_cells.push_back(map.cell_center({c, r}));
      }
    }
  }
  if (free_cells.empty()) return;  // keep the at-start initialization
  for (auto& p : ps.particles) {
    const Point2D cell = free_cells[rs.uniform_index(free_cells.size())];
    p.pose = Pose2D{cell.x, cell.y, rs.uniform(0.0, kTwoPi)};
  }
}

OccupancyGrid inflate_occupied(const OccupancyGrid& src, double radius, double threshold) {
  OccupancyGrid out = src;
  if (radius <= 0.0) return out;
  const double occupied = prob_to_log_odds(threshold);
  const int reach = static_cast<int>(std::ceil(radius / src.resolution()));
  for (int r = 0; r < src.height(); ++r) {
    for (int c = 0; c < src.width(); ++c) {
      if (src.log_odds_cell({c, r}) < occupied) continue;
      for (int dr = -reach; dr <= reach; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
          if (dr * dr + dc * dc > reach * reach) continue;
          const GridIndex n{c + dc, r + dr};
          if (!src.cell_in_bounds(n)) continue;
          out.add_log_odds(src.cell_center(n), 2.0 * src.l_max());
        }
      }
    }
  }
  return out;
}

// Restores raw map values in a disk around `center`, undoing the inflation
// there. Real walls are left alone; only dilated fringe cells revert.
void carve_around(OccupancyGrid& inflated, const OccupancyGrid& raw, const Point2D& center,
                  double radius, double threshold) {
  const double occupied = prob_to_log_odds(threshold);
  const int reach = static_cast<int>(std::ceil(radius / raw.resolution()));
  const GridIndex c0 = raw.cell_of(center);
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      if (dr * dr + dc * dc > reach * reach) continue;
      const GridIndex n{c0.col + dc, c0.row + dr};
      if (!raw.cell_in_bounds(n)) continue;
      const double raw_lo = raw.log_odds_cell(n);
      if (raw_lo >= occupied) continue;
      const double cur = inflated.log_odds_cell(n);
      if (cur > raw_lo) inflated.add_log_odds(raw.cell_center(n), raw_lo - cur);
    }
  }
}

double min_scan_range(const LidarScan& scan) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : scan.beams) best = std::min(best, b.range);
  return best;
}

void append_pose(nlohmann::ordered_json& obj, const char* key, const Pose2D& p) {
  obj[key] = {{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

struct MapQuality {
  double coverage = -1.0;
  double f1 = -1.0;
};

MapQuality learned_map_quality(const OccupancyGrid& learned, const WorldModel2D& world) {
  const double occupied = prob_to_log_odds(0.65);
  const double res = world.resolution();

  std::set<std::pair<int, int>> predicted;
  for (int r = 0; r < learned.height(); ++r) {
    for (int c = 0; c < learned.width(); ++c) {
      if (learned.log_odds_cell({c, r}) < occupied) continue;
      const Point2D p = learned.cell_center({c, r});
      const GridIndex w = world.cell_of(p.x, p.y);
      if (world.cell_in_bounds(w)) predicted.insert({w.col, w.row});
    }
  }

  int truth_total = 0;
  int covered = 0;
  int tp = 0;
  for (int r = 0; r < world.height(); ++r) {
    for (int c = 0; c < world.width(); ++c) {
      if (!world.occupied_cell({c, r})) continue;
      ++truth_total;
      if (predicted.count({c, r}) != 0) ++tp;
      bool near = false;
      const Point2D center = world.cell_center({c, r});
      for (int dr = -1; dr <= 1 && !near; ++dr) {
        for (int dc = -1; dc <= 1 && !near; ++dc) {
          const Point2D q{center.x + dc * res, center.y + dr * res};
          if (learned.log_odds_at(q) >= occupied) near = true;
        }
      }
      if (near) ++covered;
    }
  }

  MapQuality quality;
  if (truth_total == 0) return quality;
  quality.coverage = static_cast<double>(covered) / truth_total;
  const double precision =
      predicted.empty() ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted.size());
  const double recall = static_cast<double>(tp) / truth_total;
  quality.f1 =
      precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  return quality;
}

}  // namespace

MetricsReport run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir) {
  const WorldModel2D world = WorldModel2D::load(scenario.world_file);
  scenario.validate_against(world);

  RandomSource rs_sim(scenario.seed, 1);
  RandomSource rs_filter(scenario.seed, 2);
  RandomSource rs_plan(scenario.seed, 3);

  Plant plant(scenario.robot, scenario.start);
  Pose2D odom = scenario.start;

  const bool uses_filter = scenario.localization != Scenario::Localization::kOdometry;
  const bool slam_mode = scenario.localization == Scenario::Localization::kSlam;

  OccupancyGrid known_map = OccupancyGrid::from_world(world);
  OccupancyGrid learned_map = OccupancyGrid::centered(
      scenario.map_resolution, scenario.map_extent, scenario.map_extent,
      scenario.start.position());
  OccupancyGrid& nav_map = slam_mode ? learned_map : known_map;

  ParticleSet particles = ParticleSet::at_pose(scenario.start, scenario.particle_count);
  if (uses_filter && scenario.particle_init == Scenario::ParticleInit::kUniformFree) {
    seed_particles_uniform(particles, known_map, rs_filter);
  }

  Pose2D base_est = scenario.start;
  Pose2D base_odom = scenario.start;
  Pose2D est = scenario.start;

  TopicBus bus;
  BehaviorState behavior;
  behavior.init_pos = scenario.start;
  behavior.arrival_tolerance = scenario.arrival_tolerance;

  std::optional<Pose2D> nav_target;
  bool needs_plan = false;
  bool blocked = false;
  int ticks_since_plan = 0;
  Path path;
  std::optional<PlanResult> last_plan;
  FollowerState follower;
  Velocity2D latest_cmd = Velocity2D::local(0.0, 0.0, 0.0);

  MetricsReport report;

  bus.subscribe("/goal_service_control", [&](const std::any& m) {
    nav_target = std::any_cast<Pose2D>(m);
    needs_plan = true;
  });
  bus.subscribe("/blocked_path_service", [&](const std::any&) { blocked = true; });
  bus.subscribe("/cmd_vel",
                [&](const std::any& m) { latest_cmd = std::any_cast<Velocity2D>(m); });
  bus.subscribe("/goal_service_behaviour", [&](const std::any& m) {
    const Pose2D goal = std::any_cast<Pose2D>(m);
    const BehaviorAction act =
        fsm_step(behavior, BehaviorEvent::goal_requested(goal), nav_map,
                 scenario.planner.occupancy_threshold);
    if (act.type == BehaviorAction::Type::kMoveTo) {
      bus.publish("/goal_service_control", act.target);
    }
  });
  bus.register_service("/goal_service", [&](const std::any& request) -> std::any {
    const Point2D goal = std::any_cast<Point2D>(request);
    const auto plan_on = [&](const OccupancyGrid& m) {
      const auto t0 = std::chrono::steady_clock::now();
      PlanResult plan = scenario.use_rrt_star
                            ? plan_rrt_star(m, est.position(), goal, scenario.planner, rs_plan)
                            : plan_rrt(m, est.position(), goal, scenario.planner, rs_plan);
      const auto t1 = std::chrono::steady_clock::now();
      plan.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
      // The tree stops within delta_stop of the goal, which can sit outside
      // the arrival tolerance. Snap the terminal waypoint onto the goal when
      // that last hop is clear so the follower can actually arrive.
      if (!plan.path.waypoints.empty()) {
        const Point2D tail = plan.path.waypoints.back();
        const double gap = distance(tail, goal);
        if (gap > 0.0 && gap <= scenario.planner.delta_stop &&
            obstacle_free(m, tail, goal, scenario.planner)) {
          plan.path.waypoints.push_back(goal);
          plan.path.length += gap;
        }
      }
      return plan;
    };
    PlanResult plan;
    if (scenario.planner_inflation > 0.0) {
      OccupancyGrid inflated = inflate_occupied(nav_map, scenario.planner_inflation,
                                                scenario.planner.occupancy_threshold);
      try {
        plan = plan_on(inflated);
      } catch (const std::invalid_argument&) {
        // The robot itself sits inside the inflation band (it skimmed a
        // wall). Revert the dilation in a pocket around it so it can steer
        // out while the rest of the map keeps its safety margin.
        carve_around(inflated, nav_map, est.position(),
                     scenario.planner_inflation + 2.0 * nav_map.resolution(),
                     scenario.planner.occupancy_threshold);
        plan = plan_on(inflated);
      }
    } else {
      plan = plan_on(nav_map);
    }
    last_plan = plan;
    return plan.path;
  });

  enum class Leg { kIdle, kToGoal, kToHome };
  Leg leg = Leg::kIdle;
  std::size_t next_room = 0;
  std::string desired_room;

  std::ofstream trajectory, snapshots;
  const bool write_artifacts = !out_dir.empty();
  if (write_artifacts) {
    std::filesystem::create_directories(out_dir);
    trajectory.open(out_dir / "trajectory.csv", std::ios::binary);
    trajectory << "tick,true_x,true_y,true_theta,odom_x,odom_y,odom_theta,"
                  "est_x,est_y,est_theta\n";
    snapshots.open(out_dir / "snapshots.jsonl", std::ios::binary);
  }

  int tick = 0;
  for (; tick < scenario.ticks; ++tick) {
    const Pose2D truth = plant.state().true_pose;
    if (truth.x < 0.0 || truth.y < 0.0 || truth.x > world.extent_x() ||
        truth.y > world.extent_y()) {
      report.collided = true;  // left the mapped world: treated as a crash
      break;
    }

    const LidarScan scan = simulate_scan(world, truth, scenario.lidar, rs_sim);
    bus.publish("/scan", scan);
    bus.publish("/odom", odom);

    if (uses_filter && tick % scenario.slam_every == 0) {
      const double dxg = odom.x - base_odom.x;
      const double dyg = odom.y - base_odom.y;
      const double ang = wrap_to_pi(base_est.theta - base_odom.theta);
      const double c = std::cos(ang), s = std::sin(ang);
      const Velocity2D v = Velocity2D::global(
          c * dxg - s * dyg, s * dxg + c * dyg, wrap_to_pi(odom.theta - base_odom.theta));
      if (slam_mode) {
        est = slam_step(v, scan, particles, learned_map, scenario.log_odds,
                        scenario.free_on_max_range, scenario.filter, rs_filter);
        bus.publish("/mapinfo", static_cast<const OccupancyGrid*>(&learned_map));
      } else {
        est = mcl_step(v, scan, particles, known_map, scenario.filter, rs_filter);
      }
      base_est = est;
      base_odom = odom;
    } else if (uses_filter) {
      est = bridge_estimate(base_est, base_odom, odom);
    } else {
      est = odom;
    }
    bus.publish("/robot_localization", est);
    const WorldSnapshot snapshot = WorldSnapshot::make(est, &nav_map, tick);
    bus.publish("/robot_worldmodel", snapshot);

    if (leg == Leg::kIdle && next_room < scenario.visit.size()) {
      const Pose2D goal = scenario.rooms.at(scenario.visit[next_room]);
      bus.publish("/goal_service_behaviour", goal);
      if (behavior.mode == BehaviorMode::kEscorting) {
        leg = Leg::kToGoal;
        desired_room = scenario.visit[next_room];
      } else {
        ++report.planner_errors;  // rejected goal: skip it rather than stall
        ++next_room;
      }
    }

    const BehaviorEvent ev = detect_arrival(behavior, est);
    if (ev.type != BehaviorEvent::Type::kNone) {
      const BehaviorAction act =
          fsm_step(behavior, ev, nav_map, scenario.planner.occupancy_threshold);
      if (act.type == BehaviorAction::Type::kMoveTo) {
        bus.publish("/goal_service_control", act.target);
      }
      if (ev.type == BehaviorEvent::Type::kArrivedAtGoal && leg == Leg::kToGoal) {
        ++report.goals_completed;
        ++next_room;
        leg = Leg::kToHome;
        desired_room.clear();
      } else if (ev.type == BehaviorEvent::Type::kArrivedAtInit && leg == Leg::kToHome) {
        leg = Leg::kIdle;
        nav_target.reset();
        needs_plan = false;
        path = Path{};
        if (next_room >= scenario.visit.size()) {
          report.completed = true;
          break;  // not counted: the tick ends before actuation
        }
      }
    }

    if (nav_target && ticks_since_plan >= kBlockedCooldownTicks &&
        min_scan_range(scan) < scenario.blocked_range) {
      bus.publish("/blocked_path_service", true);
    }

    if (nav_target &&
        (needs_plan || replan_policy(ticks_since_plan, blocked, scenario.replan_period))) {
      try {
        const std::any resp = bus.call("/goal_service", nav_target->position());
        path = std::any_cast<Path>(resp);
        bus.publish("/robot_pathplanning", path);
        follower = FollowerState{};
        ++report.plans;
        if (last_plan) report.plan_times_ms.push_back(last_plan->elapsed_ms);
      } catch (const std::invalid_argument&) {
        ++report.planner_errors;  // estimate inside a wall: retry next period
      }
      needs_plan = false;
      blocked = false;
      ticks_since_plan = 0;
    }

    const FollowResult follow = follow_path(path, snapshot, follower, scenario.gains,
                                            scenario.arrival_tolerance);
    if (follow.progress == FollowProgress::kNeedsPath && nav_target) needs_plan = true;
    bus.publish("/cmd_vel", follow.command);

    const Plant::Outcome outcome = plant.step(latest_cmd, world, scenario.slip, rs_sim);
    const WheelSpeeds travel = encoder_to_wheel_speed(scenario.robot, outcome.encoders);
    odom = integrate_odometry(odom, local_to_global(forward_kinematics(scenario.robot, travel),
                                                    odom.theta));
    // Re-anchor the estimate on the post-step odometry so every column of a
    // trajectory row describes the same instant.
    est = uses_filter ? bridge_estimate(base_est, base_odom, odom) : odom;

    if (write_artifacts) {
      const Pose2D now = plant.state().true_pose;
      trajectory << tick << ',' << format_double(now.x) << ',' << format_double(now.y) << ','
                 << format_double(now.theta) << ',' << format_double(odom.x) << ','
                 << format_double(odom.y) << ',' << format_double(odom.theta) << ','
                 << format_double(est.x) << ',' << format_double(est.y) << ','
                 << format_double(est.theta) << '\n';
      nlohmann::ordered_json line;
      line["tick"] = tick;
      line["position"] = {{"x", est.x},
                          {"y", est.y},
                          {"theta_rad", est.theta},
                          {"theta_deg", rad_to_deg(est.theta)}};
      line["state"] = to_string(behavior.mode);
      line["desired_room"] = desired_room;
      snapshots << line.dump() << '\n';
    }
    if (outcome.collided) {
      report.collided = true;
      ++tick;
      break;
    }
    ++ticks_since_plan;
  }

  report.ticks_run = tick;
  if (!report.collided && next_room >= scenario.visit.size() && leg == Leg::kIdle) {
    report.completed = true;  // also covers goal-free localization runs
  }
  report.timeout = !report.completed && !report.collided;
  report.final_true = plant.state().true_pose;
  report.final_odom = odom;
  report.final_est = est;
  report.odom_error = distance(report.final_true.position(), report.final_odom.position());
  report.est_error = distance(report.final_true.position(), report.final_est.position());
  if (slam_mode) {
    const MapQuality q = learned_map_quality(learned_map, world);
    report.map_coverage = q.coverage;
    report.map_f1 = q.f1;
  }

  if (write_artifacts) {
    if (uses_filter) {
      (slam_mode ? learned_map : known_map).export_pgm_file(out_dir / "map.pgm");
      std::ofstream pcsv(out_dir / "particles.csv", std::ios::binary);
      write_particles_csv(pcsv, particles);
    }
    if (last_plan) {
      std::ofstream tcsv(out_dir / "tree.csv", std::ios::binary);
      write_tree_csv(tcsv, last_plan->tree);
      std::ofstream pathcsv(out_dir / "path.csv", std::ios::binary);
      write_path_csv(pathcsv, last_plan->path);
    }

    nlohmann::ordered_json metrics;
    metrics["completed"] = report.completed;
    metrics["timeout"] = report.timeout;
    metrics["collided"] = report.collided;
    metrics["ticks"] = report.ticks_run;
    metrics["goals_completed"] = report.goals_completed;
    metrics["plans"] = report.plans;
    metrics["planner_errors"] = report.planner_errors;
    append_pose(metrics, "final_true", report.final_true);
    append_pose(metrics, "final_odom", report.final_odom);
    append_pose(metrics, "final_est", report.final_est);
    metrics["odom_error"] = report.odom_error;
    metrics["est_error"] = report.est_error;
    if (slam_mode) {
      metrics["map_coverage"] = report.map_coverage;
      metrics["map_f1"] = report.map_f1;
    }
    std::ofstream mjson(out_dir / "metrics.json", std::ios::binary);
    mjson << metrics.dump(2) << '\n';
  }
  return report;
}

}  // namespace omninav
