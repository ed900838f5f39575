#include "omninav/planning/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace omninav {

namespace {

double axis_coord(const Point2D& p, int axis) { return axis == 0 ? p.x : p.y; }

}  // namespace

void KdTree::insert(const Point2D& p, std::size_t id) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw std::invalid_argument("KdTree::insert: point must be finite");
  }
  const int fresh = static_cast<int>(nodes_.size());
  nodes_.push_back({p, id, -1, -1});
  if (fresh == 0) return;

  int cur = 0;
  int axis = 0;
  for (;;) {
    Node& n = nodes_[static_cast<std::size_t>(cur)];
    int& branch = axis_coord(p, axis) < axis_coord(n.p, axis) ? n.left : n.right;
    if (branch == -1) {
      branch = fresh;
      return;
    }
    cur = branch;
    axis ^= 1;
  }
}

IndexedPoint KdTree::nearest(const Point2D& query) const {
  if (nodes_.empty()) throw std::logic_error("KdTree::nearest: tree is empty");
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_node = 0;
  nearest_walk(0, 0, query, best_d2, best_node);
  const Node& n = nodes_[best_node];
  return {n.id, n.p};
}

void KdTree::nearest_walk(int node, int axis, const Point2D& query, double& best_d2,
                          std::size_t& best_node) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  const double d2 = distance_sq(n.p, query);
  if (d2 < best_d2 || (d2 == best_d2 && n.id < nodes_[best_node].id)) {
    best_d2 = d2;
    best_node = static_cast<std::size_t>(node);
  }
  const double diff = axis_coord(query, axis) - axis_coord(n.p, axis);
  const int near_side = diff < 0.0 ? n.left : n.right;
  const int far_side = diff < 0.0 ? n.right : n.left;
  if (near_side != -1) nearest_walk(near_side, axis ^ 1, query, best_d2, best_node);
  // The far half-space can still hold an equal-distance, lower-id point.
  if (far_side != -1 && diff * diff <= best_d2) {
    nearest_walk(far_side, axis ^ 1, query, best_d2, best_node);
  }
}

std::vector<IndexedPoint> KdTree::within_radius(const Point2D& query, double r) const {
  if (r < 0.0) throw std::domain_error("KdTree::within_radius: r must be >= 0");
  std::vector<IndexedPoint> out;
  if (!nodes_.empty()) radius_walk(0, 0, query, r, r * r, out);
  std::sort(out.begin(), out.end(),
            [](const IndexedPoint& a, const IndexedPoint& b) { return a.first < b.first; });
  return out;
}

void KdTree::radius_walk(int node, int axis, const Point2D& query, double r, double r2,
                         std::vector<IndexedPoint>& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(node)];
  if (distance_sq(n.p, query) <= r2) out.emplace_back(n.id, n.p);
  const double diff = axis_coord(query, axis) - axis_coord(n.p, axis);
  if (n.left != -1 && diff <= r) radius_walk(n.left, axis ^ 1, query, r, r2, out);
  if (n.right != -1 && -diff <= r) radius_walk(n.right, axis ^ 1, query, r, r2, out);
}

void LinearIndex::insert(const Point2D& p, std::size_t id) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw std::invalid_argument("LinearIndex::insert: point must be finite");
  }
  points_.emplace_back(id, p);
}

IndexedPoint LinearIndex::nearest(const Point2D& query) const {
  if (points_.empty()) throw std::logic_error("LinearIndex::nearest: index is empty");
  std::size_t best = 0;
  double best_d2 = distance_sq(points_[0].second, query);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double d2 = distance_sq(points_[i].second, query);
    if (d2 < best_d2 || (d2 == best_d2 && points_[i].first < points_[best].first)) {
      best_d2 = d2;
      best = i;
    }
  }
  return points_[best];
}

std::vector<IndexedPoint> LinearIndex::within_radius(const Point2D& query, double r) const {
  if (r < 0.0) throw std::domain_error("LinearIndex::within_radius: r must be >= 0");
  std::vector<IndexedPoint> out;
  const double r2 = r * r;
  for (const auto& ip : points_) {
    if (distance_sq(ip.second, query) <= r2) out.push_back(ip);
  }
  std::sort(out.begin(), out.end(),
            [](const IndexedPoint& a, const IndexedPoint& b) { return a.first < b.first; });
  return out;
}

}  // namespace omninav
