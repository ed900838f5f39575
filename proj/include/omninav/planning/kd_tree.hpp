#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "omninav/core/types.hpp"

namespace omninav {

using IndexedPoint = std::pair<std::size_t, Point2D>;

// 2-d tree over points with caller-supplied ids. Split axis alternates with
// depth (x at the root); equal coordinates descend right. Insertion only.
// Nearest-neighbor ties resolve to the lowest id.
class KdTree {
 public:
  void insert(const Point2D& p, std::size_t id);
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  // Exact Euclidean nearest. Throws std::logic_error on an empty tree.
  IndexedPoint nearest(const Point2D& query) const;
  // All points with distance <= r, sorted by id. Throws std::domain_error
  // for r < 0.
  std::vector<IndexedPoint> within_radius(const Point2D& query, double r) const;

 private:
  struct Node {
    Point2D p;
    std::size_t id;
    int left = -1;
    int right = -1;
  };

  void nearest_walk(int node, int axis, const Point2D& query, double& best_d2,
                    std::size_t& best_node) const;
  void radius_walk(int node, int axis, const Point2D& query, double r, double r2,
                   std::vector<IndexedPoint>& out) const;

  std::vector<Node> nodes_;
};

// Brute-force index with the same interface and tie rules; reference backend
// for benchmarks and tests.
class LinearIndex {
 public:
  void insert(const Point2D& p, std::size_t id);
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  IndexedPoint nearest(const Point2D& query) const;
  std::vector<IndexedPoint> within_radius(const Point2D& query, double r) const;

 private:
  std::vector<IndexedPoint> points_;
};

}  // namespace omninav
