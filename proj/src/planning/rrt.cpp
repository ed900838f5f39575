#include "omninav/planning/rrt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "omninav/core/format.hpp"

namespace omninav {

void PlannerParams::validate() const {
  if (max_iterations < 1) {
    throw std::invalid_argument("PlannerParams: max_iterations must be >= 1");
  }
  if (!(delta_stop > 0.0) || !(delta_stop < delta_step)) {
    throw std::invalid_argument("PlannerParams: need 0 < delta_stop < delta_step");
  }
  if (!(r_near > 0.0)) {
    throw std::invalid_argument("PlannerParams: r_near must be > 0");
  }
  if (!(sample_margin >= 0.0)) {
    throw std::invalid_argument("PlannerParams: sample_margin must be >= 0");
  }
  if (!(occupancy_threshold > 0.0) || !(occupancy_threshold <= 1.0)) {
    throw std::invalid_argument("PlannerParams: occupancy_threshold must be in (0, 1]");
  }
}

double Path::length_of(const std::vector<Point2D>& pts) {
  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    total += distance(pts[i - 1], pts[i]);
  }
  return total;
}

bool obstacle_free(const OccupancyGrid& map, const Point2D& a, const Point2D& b,
                   const PlannerParams& params) {
  const double step =
      params.obstacle_check_step > 0.0 ? params.obstacle_check_step : map.resolution() / 2.0;
  const double d = distance(a, b);
  const int n = d > 0.0 ? static_cast<int>(std::ceil(d / step)) : 0;
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(i * step, d);
    const Point2D p{a.x + (b.x - a.x) * (d > 0.0 ? t / d : 0.0),
                    a.y + (b.y - a.y) * (d > 0.0 ? t / d : 0.0)};
    if (map.occupancy_at(p) >= params.occupancy_threshold) return false;
  }
  return true;
}

namespace {

template <typename Index>
PlanResult plan_impl(const OccupancyGrid& map, const Point2D& q_init, const Point2D& q_goal,
                     const PlannerParams& params, bool rewire, RandomSource& rs) {
  params.validate();
  if (!std::isfinite(q_init.x) || !std::isfinite(q_init.y) || !std::isfinite(q_goal.x) ||
      !std::isfinite(q_goal.y)) {
    throw std::invalid_argument("plan: start and goal must be finite");
  }
  if (!map.contains(q_init) || map.occupancy_at(q_init) >= params.occupancy_threshold) {
    throw std::invalid_argument("plan: start is outside the map or inside an obstacle");
  }

  const auto t0 = std::chrono::steady_clock::now();

  PlanResult result;
  result.tree.push_back({0, q_init, std::nullopt, 0.0});
  Index index;
  index.insert(q_init, 0);

  const Point2D lo{std::min(q_init.x, q_goal.x) - params.sample_margin,
                   std::min(q_init.y, q_goal.y) - params.sample_margin};
  const Point2D hi{std::max(q_init.x, q_goal.x) + params.sample_margin,
                   std::max(q_init.y, q_goal.y) + params.sample_margin};

  for (int k = 1; k <= params.max_iterations; ++k) {
    const IndexedPoint goal_near = index.nearest(q_goal);
    if (distance(q_goal, goal_near.second) <= params.delta_stop) break;

    ++result.iterations;
    const Point2D q_ref{rs.uniform(lo.x, hi.x), rs.uniform(lo.y, hi.y)};
    result.samples.push_back(q_ref);
    if (!map.contains(q_ref) || map.occupancy_at(q_ref) >= params.occupancy_threshold) {
      continue;
    }

    const auto [near_id, near_p] = index.nearest(q_ref);
    const double d_ref = distance(near_p, q_ref);
    const double r = rs.uniform(params.delta_stop, params.delta_step);
    if (d_ref == 0.0) continue;  // steering direction undefined
    const Point2D q_new{near_p.x + (q_ref.x - near_p.x) / d_ref * r,
                        near_p.y + (q_ref.y - near_p.y) / d_ref * r};
    if (!obstacle_free(map, near_p, q_new, params)) continue;

    std::size_t parent = near_id;
    double cost = result.tree[near_id].cost + distance(near_p, q_new);
    if (rewire) {
      for (const auto& [qid, qp] : index.within_radius(q_new, params.r_near)) {
        const double c = result.tree[qid].cost + distance(q_new, qp);
        if (c < cost && obstacle_free(map, qp, q_new, params)) {
          cost = c;
          parent = qid;
        }
      }
    }
    const std::size_t fresh = result.tree.size();
    result.tree.push_back({fresh, q_new, parent, cost});
    index.insert(q_new, fresh);
  }

  const IndexedPoint end = index.nearest(q_goal);
  result.complete = distance(q_goal, end.second) <= params.delta_stop;

  std::size_t cursor = end.first;
  std::vector<Point2D> reversed;
  for (;;) {
    const PlanNode& node = result.tree[cursor];
    reversed.push_back(node.position);
    if (!node.parent) break;
    cursor = *node.parent;
  }
  result.path.waypoints.assign(reversed.rbegin(), reversed.rend());
  result.path.length = Path::length_of(result.path.waypoints);

  const auto t1 = std::chrono::steady_clock::now();
  result.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return result;
}

PlanResult plan_dispatch(const OccupancyGrid& map, const Point2D& q_init,
                         const Point2D& q_goal, const PlannerParams& params, bool rewire,
                         RandomSource& rs) {
  if (params.backend == NearestBackend::kLinear) {
    return plan_impl<LinearIndex>(map, q_init, q_goal, params, rewire, rs);
  }
  return plan_impl<KdTree>(map, q_init, q_goal, params, rewire, rs);
}

}  // namespace

PlanResult plan_rrt(const OccupancyGrid& map, const Point2D& q_init, const Point2D& q_goal,
                    const PlannerParams& params, RandomSource& rs) {
  return plan_dispatch(map, q_init, q_goal, params, false, rs);
}

PlanResult plan_rrt_star(const OccupancyGrid& map, const Point2D& q_init,
                         const Point2D& q_goal, const PlannerParams& params,
                         RandomSource& rs) {
  return plan_dispatch(map, q_init, q_goal, params, true, rs);
}

void write_tree_csv(std::ostream& out, const std::vector<PlanNode>& tree) {
  out << "id,x,y,parent,cost\n";
  for (const PlanNode& n : tree) {
    out << n.id << ',' << format_double(n.position.x) << ',' << format_double(n.position.y)
        << ',';
    if (n.parent) {
      out << *n.parent;
    } else {
      out << -1;
    }
    out << ',' << format_double(n.cost) << '\n';
  }
}

void write_path_csv(std::ostream& out, const Path& path) {
  out << "x,y\n";
  for (const Point2D& p : path.waypoints) {
    out << format_double(p.x) << ',' << format_double(p.y) << '\n';
  }
}

}  // namespace omninav
