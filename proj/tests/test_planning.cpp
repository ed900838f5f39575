#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omninav/planning/kd_tree.hpp"
#include "omninav/planning/rrt.hpp"
#include "omninav/sensing/world_model.hpp"

using namespace omninav;

namespace {

OccupancyGrid empty_map(double side_m = 10.0) {
  const int cells = static_cast<int>(side_m / 0.1);
  return OccupancyGrid::from_world(WorldModel2D(cells, cells, 0.1));
}

// 10 m x 10 m with the goal at (8, 8) sealed inside a wall ring.
OccupancyGrid walled_goal_map() {
  WorldModel2D w(100, 100, 0.1);
  for (int i = 70; i <= 90; ++i) {
    w.set_occupied({i, 70}, true);
    w.set_occupied({i, 90}, true);
    w.set_occupied({70, i}, true);
    w.set_occupied({90, i}, true);
  }
  return OccupancyGrid::from_world(w);
}

}  // namespace

TEST_CASE("kd tree basic insertion and nearest") {
  KdTree t;
  CHECK(t.empty());
  CHECK_THROWS_AS(t.nearest({0, 0}), std::logic_error);

  t.insert({3.0, 4.0}, 0);
  CHECK(t.size() == 1);
  auto [id, p] = t.nearest({-100.0, 50.0});
  CHECK(id == 0);
  CHECK(p.x == 3.0);
  CHECK(p.y == 4.0);

  CHECK_THROWS_AS(t.insert({std::nan(""), 0.0}, 1), std::invalid_argument);
}

TEST_CASE("kd tree three-point example") {
  KdTree t;
  t.insert({0, 0}, 0);
  t.insert({5, 5}, 1);
  t.insert({10, 0}, 2);
  const auto [id, p] = t.nearest({6, 4});
  CHECK(id == 1);
  CHECK(p.x == 5.0);

  const auto [eid, ep] = t.nearest({10, 0});
  CHECK(eid == 2);
  CHECK(distance(ep, {10, 0}) == 0.0);
}

TEST_CASE("kd tree duplicate points resolve to the lowest id") {
  KdTree t;
  t.insert({1.0, 1.0}, 0);
  t.insert({2.0, 2.0}, 1);
  t.insert({1.0, 1.0}, 2);
  CHECK(t.nearest({1.0, 1.0}).first == 0);
  CHECK(t.nearest({0.9, 1.1}).first == 0);

  // Symmetric pair equidistant from the query.
  KdTree s;
  s.insert({2.0, 0.0}, 7);
  s.insert({-2.0, 0.0}, 3);
  CHECK(s.nearest({0.0, 5.0}).first == 3);
}

TEST_CASE("kd tree within_radius edge cases") {
  KdTree t;
  t.insert({0, 0}, 0);
  t.insert({1, 0}, 1);
  t.insert({0, 2}, 2);
  CHECK_THROWS_AS(t.within_radius({0, 0}, -0.1), std::domain_error);

  const auto on_point = t.within_radius({1, 0}, 0.0);
  REQUIRE(on_point.size() == 1);
  CHECK(on_point[0].first == 1);

  const auto all = t.within_radius({0, 0}, 100.0);
  REQUIRE(all.size() == 3);
  CHECK(all[0].first == 0);
  CHECK(all[1].first == 1);
  CHECK(all[2].first == 2);

  const auto boundary = t.within_radius({0, 0}, 1.0);
  REQUIRE(boundary.size() == 2);  // distance exactly 1 is included
}

TEST_CASE("kd tree queries match the linear index on random instances") {
  RandomSource rs(2025, 1);
  for (int trial = 0; trial < 300; ++trial) {
    KdTree kd;
    LinearIndex lin;
    const std::size_t n = 1 + rs.uniform_index(256);
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse lattice coordinates force frequent exact ties.
      const Point2D p{std::floor(rs.uniform(-8.0, 8.0) * 4.0) / 4.0,
                      std::floor(rs.uniform(-8.0, 8.0) * 4.0) / 4.0};
      kd.insert(p, i);
      lin.insert(p, i);
    }
    for (int q = 0; q < 20; ++q) {
      const Point2D query{std::floor(rs.uniform(-9.0, 9.0) * 4.0) / 4.0,
                          std::floor(rs.uniform(-9.0, 9.0) * 4.0) / 4.0};
      const auto a = kd.nearest(query);
      const auto b = lin.nearest(query);
      REQUIRE(a.first == b.first);
      REQUIRE(a.second.x == b.second.x);
      REQUIRE(a.second.y == b.second.y);

      const double r = rs.uniform(0.0, 6.0);
      const auto ra = kd.within_radius(query, r);
      const auto rb = lin.within_radius(query, r);
      REQUIRE(ra.size() == rb.size());
      for (std::size_t i = 0; i < ra.size(); ++i) {
        REQUIRE(ra[i].first == rb[i].first);
      }
    }
  }
}

TEST_CASE("obstacle_free on a one-wall map") {
  WorldModel2D w(100, 100, 0.1);
  for (int r = 0; r < 100; ++r) w.set_occupied({50, r}, true);
  const auto map = OccupancyGrid::from_world(w);
  PlannerParams params;

  CHECK(obstacle_free(map, {1.0, 1.0}, {1.0, 1.0}, params));
  CHECK(obstacle_free(map, {1.0, 1.0}, {4.0, 8.0}, params));
  CHECK_FALSE(obstacle_free(map, {4.0, 5.0}, {6.0, 5.0}, params));
  CHECK_FALSE(obstacle_free(map, {5.05, 5.0}, {5.05, 5.0}, params));

  // Unknown cells read as 0.5 occupancy and pass.
  OccupancyGrid unknown(0.1, 100, 100, {0, 0});
  CHECK(obstacle_free(unknown, {1.0, 1.0}, {8.0, 8.0}, params));
}

TEST_CASE("planner rejects a blocked or out-of-map start") {
  const auto map = walled_goal_map();
  PlannerParams params;
  RandomSource rs(1, 0);
  CHECK_THROWS_AS(plan_rrt(map, {7.0, 7.0}, {1.0, 1.0}, params, rs), std::invalid_argument);
  CHECK_THROWS_AS(plan_rrt(map, {-5.0, 0.0}, {1.0, 1.0}, params, rs), std::invalid_argument);
  PlannerParams bad;
  bad.delta_stop = 1.0;
  bad.delta_step = 0.5;
  CHECK_THROWS_AS(plan_rrt(map, {1.0, 1.0}, {2.0, 2.0}, bad, rs), std::invalid_argument);
}

TEST_CASE("goal already within the stop radius degenerates to the start") {
  const auto map = empty_map();
  PlannerParams params;
  RandomSource rs(3, 0);
  const auto res = plan_rrt(map, {2.0, 2.0}, {2.1, 2.0}, params, rs);
  CHECK(res.complete);
  CHECK(res.iterations == 0);
  CHECK(res.tree.size() == 1);
  REQUIRE(res.path.waypoints.size() == 1);
  CHECK(res.path.waypoints[0].x == 2.0);
  CHECK(res.path.length == 0.0);
}

TEST_CASE("rrt crosses an empty map from 100 seeds") {
  const auto map = empty_map();
  const Point2D start{0.0, 0.0};
  const Point2D goal{8.0, 0.0};
  PlannerParams params;
  // The uncapped step makes the last approach into the stop radius a slow
  // event near the map edge; the default budget leaves ~10% of seeds a few
  // centimeters short, so the crossing property gets a bigger budget.
  params.max_iterations = 2500;
  int with_direct_bound = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomSource rs(seed, 11);
    const auto res = plan_rrt(map, start, goal, params, rs);
    REQUIRE(res.complete);
    REQUIRE(res.path.waypoints.size() >= 2);
    // The endpoint sits within delta_stop of the goal, so the sound lower
    // bound is the straight-line distance less the stop radius.
    REQUIRE(res.path.length >= 8.0 - params.delta_stop);
    if (res.path.length >= 8.0) ++with_direct_bound;
    REQUIRE(res.path.waypoints[0].x == start.x);
    REQUIRE(res.path.waypoints[0].y == start.y);
    REQUIRE(distance(res.path.waypoints.back(), goal) <= params.delta_stop);
  }
  CHECK(with_direct_bound >= 95);
}

TEST_CASE("unreachable goal exhausts the iteration budget") {
  const auto map = walled_goal_map();
  PlannerParams params;
  params.max_iterations = 80;
  RandomSource rs(9, 0);
  const auto res = plan_rrt(map, {2.0, 2.0}, {8.0, 8.0}, params, rs);
  CHECK_FALSE(res.complete);
  CHECK(res.iterations == 80);
  CHECK_FALSE(res.path.waypoints.empty());
  CHECK(distance(res.path.waypoints.back(), {8.0, 8.0}) > params.delta_stop);
}

TEST_CASE("sampling stays inside the inflated start-goal box") {
  const auto map = empty_map();
  PlannerParams params;
  params.sample_margin = 0.7;
  RandomSource rs(21, 0);
  const auto res = plan_rrt(map, {6.0, 2.0}, {1.0, 5.0}, params, rs);
  CHECK_FALSE(res.samples.empty());
  for (const auto& s : res.samples) {
    REQUIRE(s.x >= 1.0 - 0.7);
    REQUIRE(s.x <= 6.0 + 0.7);
    REQUIRE(s.y >= 2.0 - 0.7);
    REQUIRE(s.y <= 5.0 + 0.7);
  }
}

TEST_CASE("tree structure and costs are consistent") {
  const auto map = empty_map();
  PlannerParams params;
  RandomSource rs(33, 2);
  const auto res = plan_rrt_star(map, {1.0, 1.0}, {8.5, 8.5}, params, rs);
  REQUIRE(res.tree.size() > 1);
  CHECK_FALSE(res.tree[0].parent.has_value());
  CHECK(res.tree[0].cost == 0.0);
  for (std::size_t i = 1; i < res.tree.size(); ++i) {
    const auto& n = res.tree[i];
    REQUIRE(n.parent.has_value());
    REQUIRE(*n.parent < i);  // parents always predate children
    const auto& par = res.tree[*n.parent];
    REQUIRE(n.cost ==
            doctest::Approx(par.cost + distance(par.position, n.position)).epsilon(1e-9));
  }
  // Root-sum recomputation down every parent chain.
  for (const auto& n : res.tree) {
    double walked = 0.0;
    const PlanNode* cur = &n;
    while (cur->parent) {
      const PlanNode& par = res.tree[*cur->parent];
      walked += distance(par.position, cur->position);
      cur = &par;
    }
    REQUIRE(walked == doctest::Approx(n.cost).epsilon(1e-9));
  }
  // Every returned path segment passes the collision check.
  for (std::size_t i = 1; i < res.path.waypoints.size(); ++i) {
    REQUIRE(obstacle_free(map, res.path.waypoints[i - 1], res.path.waypoints[i], params));
  }
}

TEST_CASE("rrt-star with a vanishing radius reduces to rrt") {
  const auto map = empty_map();
  PlannerParams params;
  params.r_near = 1e-12;
  RandomSource ra(55, 1);
  RandomSource rb(55, 1);
  const auto star = plan_rrt_star(map, {1.0, 1.0}, {8.0, 6.0}, params, ra);
  const auto plain = plan_rrt(map, {1.0, 1.0}, {8.0, 6.0}, params, rb);
  REQUIRE(star.tree.size() == plain.tree.size());
  for (std::size_t i = 0; i < star.tree.size(); ++i) {
    REQUIRE(star.tree[i].position.x == plain.tree[i].position.x);
    REQUIRE(star.tree[i].position.y == plain.tree[i].position.y);
    REQUIRE(star.tree[i].parent == plain.tree[i].parent);
    REQUIRE(star.tree[i].cost == plain.tree[i].cost);
  }
  REQUIRE(star.path.length == plain.path.length);
}

TEST_CASE("rrt-star grows the same node positions as rrt") {
  const auto map = empty_map();
  PlannerParams params;
  RandomSource ra(56, 1);
  RandomSource rb(56, 1);
  const auto star = plan_rrt_star(map, {1.0, 1.0}, {8.0, 6.0}, params, ra);
  const auto plain = plan_rrt(map, {1.0, 1.0}, {8.0, 6.0}, params, rb);
  REQUIRE(star.tree.size() == plain.tree.size());
  for (std::size_t i = 0; i < star.tree.size(); ++i) {
    REQUIRE(star.tree[i].position.x == plain.tree[i].position.x);
    REQUIRE(star.tree[i].position.y == plain.tree[i].position.y);
    REQUIRE(star.tree[i].cost <= plain.tree[i].cost + 1e-12);
  }
}

TEST_CASE("rrt-star shortens paths on average over paired seeds") {
  const auto map = empty_map();
  PlannerParams params;
  double sum_rrt = 0.0;
  double sum_star = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomSource ra(seed, 77);
    RandomSource rb(seed, 77);
    sum_rrt += plan_rrt(map, {0.5, 0.5}, {9.0, 9.0}, params, ra).path.length;
    sum_star += plan_rrt_star(map, {0.5, 0.5}, {9.0, 9.0}, params, rb).path.length;
  }
  CHECK(sum_star <= sum_rrt);
}

TEST_CASE("kd and linear backends produce identical plans") {
  const auto map = empty_map();
  PlannerParams kd;
  PlannerParams lin;
  lin.backend = NearestBackend::kLinear;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    RandomSource ra(seed, 5);
    RandomSource rb(seed, 5);
    const auto a = plan_rrt_star(map, {1.0, 8.0}, {9.0, 1.0}, kd, ra);
    const auto b = plan_rrt_star(map, {1.0, 8.0}, {9.0, 1.0}, lin, rb);
    REQUIRE(a.tree.size() == b.tree.size());
    REQUIRE(a.path.length == b.path.length);
    for (std::size_t i = 0; i < a.tree.size(); ++i) {
      REQUIRE(a.tree[i].position.x == b.tree[i].position.x);
      REQUIRE(a.tree[i].parent == b.tree[i].parent);
    }
  }
}

TEST_CASE("planning is deterministic per seed") {
  const auto map = empty_map();
  PlannerParams params;
  auto run = [&](std::uint64_t seed) {
    RandomSource rs(seed, 8);
    const auto res = plan_rrt_star(map, {1.0, 1.0}, {9.0, 5.0}, params, rs);
    std::ostringstream tree, path;
    write_tree_csv(tree, res.tree);
    write_path_csv(path, res.path);
    return tree.str() + "|" + path.str();
  };
  CHECK(run(7) == run(7));
  CHECK(run(7) != run(8));
}

TEST_CASE("csv writers") {
  std::vector<PlanNode> tree;
  tree.push_back({0, {0.5, 0.25}, std::nullopt, 0.0});
  tree.push_back({1, {1.5, 0.25}, 0, 1.0});
  std::ostringstream t;
  write_tree_csv(t, tree);
  CHECK(t.str() == "id,x,y,parent,cost\n0,0.5,0.25,-1,0\n1,1.5,0.25,0,1\n");

  Path p;
  p.waypoints = {{0.5, 0.25}, {1.5, 0.25}};
  p.length = 1.0;
  std::ostringstream s;
  write_path_csv(s, p);
  CHECK(s.str() == "x,y\n0.5,0.25\n1.5,0.25\n");
}
