#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "omninav/core/angle.hpp"

namespace omninav {

struct Point2D {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2D& a, const Point2D& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

inline double distance_sq(const Point2D& a, const Point2D& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  return dx * dx + dy * dy;
}

// Planar pose. theta is kept in [0, 2*pi) by every constructor and mutator
// in this codebase; raw member writes are the caller's responsibility.
struct Pose2D {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  Pose2D() = default;
  Pose2D(double x_, double y_, double theta_) : x(x_), y(y_), theta(normalize_angle(theta_)) {}

  Point2D position() const { return {x, y}; }
};

enum class Frame { Local, Global };

// Planar twist. Local = robot frame (x forward), Global = world frame.
struct Velocity2D {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
  Frame frame = Frame::Local;

  static Velocity2D local(double vx, double vy, double omega) {
    return {vx, vy, omega, Frame::Local};
  }
  static Velocity2D global(double vx, double vy, double omega) {
    return {vx, vy, omega, Frame::Global};
  }

  void require_frame(Frame expected, const char* where) const {
    if (frame != expected) {
      throw std::logic_error(std::string(where) + ": velocity is in the wrong frame");
    }
  }
};

struct GridIndex {
  int col = 0;
  int row = 0;

  bool operator==(const GridIndex&) const = default;
};

// Discrete simulation clock. dt is seconds per tick and only matters for
// reporting; all rates in the stack are per-tick quantities.
class SimClock {
 public:
  explicit SimClock(double dt = 0.05) : dt_(dt) {
    if (!(dt > 0.0)) {
      throw std::invalid_argument("SimClock: dt must be > 0");
    }
  }

  std::int64_t tick() const { return tick_; }
  double dt() const { return dt_; }
  double elapsed() const { return static_cast<double>(tick_) * dt_; }
  void advance() { ++tick_; }

 private:
  std::int64_t tick_ = 0;
  double dt_;
};

}  // namespace omninav
