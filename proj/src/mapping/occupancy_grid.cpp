#include "omninav/mapping/occupancy_grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "omninav/core/angle.hpp"

namespace omninav {

double prob_to_log_odds(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::domain_error("prob_to_log_odds: p must be in (0, 1)");
  }
  return std::log(p / (1.0 - p));
}

double log_odds_to_prob(double l) { return 1.0 / (1.0 + std::exp(-l)); }

void LogOddsParams::validate() const {
  if (!(l_occ > 0.0) || !(l_free < 0.0)) {
    throw std::invalid_argument("LogOddsParams: need l_occ > 0 > l_free");
  }
  if (std::abs(l_0) >= std::min(l_occ, -l_free)) {
    throw std::invalid_argument("LogOddsParams: |l_0| must be small against l_occ and l_free");
  }
}

OccupancyGrid::OccupancyGrid(double resolution, int width, int height, Point2D origin,
                             double l_min, double l_max)
    : resolution_(resolution),
      width_(width),
      height_(height),
      origin_(origin),
      l_min_(l_min),
      l_max_(l_max) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("OccupancyGrid: resolution must be > 0");
  }
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("OccupancyGrid: empty grid");
  }
  if (!(l_min < 0.0) || !(l_max > 0.0)) {
    throw std::invalid_argument("OccupancyGrid: need l_min < 0 < l_max");
  }
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0.0);
}

OccupancyGrid OccupancyGrid::centered(double resolution, double extent_x, double extent_y,
                                      Point2D center, double l_min, double l_max) {
  const int w = std::max(1, static_cast<int>(std::ceil(extent_x / resolution)));
  const int h = std::max(1, static_cast<int>(std::ceil(extent_y / resolution)));
  const Point2D origin{center.x - (w - 1) * 0.5 * resolution,
                       center.y - (h - 1) * 0.5 * resolution};
  return {resolution, w, h, origin, l_min, l_max};
}

OccupancyGrid OccupancyGrid::from_world(const WorldModel2D& world, double l_min, double l_max) {
  const double res = world.resolution();
  OccupancyGrid g(res, world.width(), world.height(), {res / 2.0, res / 2.0}, l_min, l_max);
  for (int r = 0; r < world.height(); ++r) {
    for (int c = 0; c < world.width(); ++c) {
      g.cells_[g.flat({c, r})] = world.occupied_cell({c, r}) ? l_max : l_min;
    }
  }
  return g;
}

GridIndex OccupancyGrid::cell_of(const Point2D& p) const {
  // Points on a cell boundary belong to the higher-index cell; the epsilon
  // absorbs float error when a sample lands exactly on a half-cell boundary
  // (the free-space march does this on axis-aligned beams).
  constexpr double tie = 1e-9;
  return {static_cast<int>(std::floor((p.x - origin_.x) / resolution_ + 0.5 + tie)),
          static_cast<int>(std::floor((p.y - origin_.y) / resolution_ + 0.5 + tie))};
}

Point2D OccupancyGrid::cell_center(GridIndex c) const {
  return {origin_.x + c.col * resolution_, origin_.y + c.row * resolution_};
}

bool OccupancyGrid::cell_in_bounds(GridIndex c) const {
  return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
}

std::size_t OccupancyGrid::flat(GridIndex c) const {
  return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
         static_cast<std::size_t>(c.col);
}

double OccupancyGrid::log_odds_cell(GridIndex c) const {
  if (!cell_in_bounds(c)) {
    return 0.0;
  }
  return cells_[flat(c)];
}

double OccupancyGrid::occupancy_at(const Point2D& p) const {
  return log_odds_to_prob(log_odds_at(p));
}

bool OccupancyGrid::hit_obstacle(const Point2D& p, double threshold) const {
  return occupancy_at(p) >= threshold;
}

void OccupancyGrid::grow_to_include(GridIndex c) {
  int add_left = 0, add_right = 0, add_down = 0, add_up = 0;
  if (c.col < 0) {
    add_left = std::max(width_, -c.col);
  }
  if (c.col >= width_) {
    add_right = std::max(width_, c.col - width_ + 1);
  }
  if (c.row < 0) {
    add_down = std::max(height_, -c.row);
  }
  if (c.row >= height_) {
    add_up = std::max(height_, c.row - height_ + 1);
  }
  const int new_w = width_ + add_left + add_right;
  const int new_h = height_ + add_down + add_up;
  std::vector<double> grown(static_cast<std::size_t>(new_w) * static_cast<std::size_t>(new_h),
                            0.0);
  for (int r = 0; r < height_; ++r) {
    const std::size_t src = static_cast<std::size_t>(r) * static_cast<std::size_t>(width_);
    const std::size_t dst =
        static_cast<std::size_t>(r + add_down) * static_cast<std::size_t>(new_w) +
        static_cast<std::size_t>(add_left);
    std::copy_n(cells_.begin() + static_cast<std::ptrdiff_t>(src), width_,
                grown.begin() + static_cast<std::ptrdiff_t>(dst));
  }
  cells_ = std::move(grown);
  width_ = new_w;
  height_ = new_h;
  origin_.x -= add_left * resolution_;
  origin_.y -= add_down * resolution_;
}

void OccupancyGrid::add_log_odds(const Point2D& p, double delta) {
  GridIndex c = cell_of(p);
  if (!cell_in_bounds(c)) {
    grow_to_include(c);
    c = cell_of(p);
  }
  double& cell = cells_[flat(c)];
  cell = std::clamp(cell + delta, l_min_, l_max_);
}

void OccupancyGrid::integrate_scan(const LidarScan& scan, const Pose2D& pose,
                                   const LogOddsParams& params, bool free_on_max_range) {
  const double grid = resolution_;
  const double occ_delta = params.l_occ - params.l_0;
  const double free_delta = params.l_free - params.l_0;

  for (const auto& beam : scan.beams) {
    const double world_angle = pose.theta + scan.mount_rotation + beam.angle;
    const double cx = std::cos(world_angle);
    const double cy = std::sin(world_angle);

    double free_until = -1.0;
    if (beam.range < scan.range_max) {
      add_log_odds({pose.x + beam.range * cx, pose.y + beam.range * cy}, occ_delta);
      free_until = beam.range;
    } else if (free_on_max_range) {
      free_until = scan.range_max;
    }
    if (free_until < 0.0) {
      continue;
    }
    // Free-space samples sit half a cell behind each whole-cell step and
    // stop one full cell short of the endpoint; the first sample clamps the
    // half-cell offset at the pose itself.
    for (long k = 0;; ++k) {
      const double scale = static_cast<double>(k) * grid;
      if (!(scale < free_until - grid)) {
        break;
      }
      const double d = std::max(0.0, scale - grid / 2.0);
      add_log_odds({pose.x + d * cx, pose.y + d * cy}, free_delta);
    }
  }
}

void OccupancyGrid::export_pgm(std::ostream& out) const {
  out << "P5\n" << width_ << " " << height_ << "\n255\n";
  for (int r = height_ - 1; r >= 0; --r) {
    for (int c = 0; c < width_; ++c) {
      const double p = log_odds_to_prob(cells_[flat({c, r})]);
      unsigned char px = 128;
      if (p >= 0.65) {
        px = 0;
      } else if (p <= 0.35) {
        px = 255;
      }
      out.put(static_cast<char>(px));
    }
  }
}

void OccupancyGrid::export_pgm_file(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw std::runtime_error("OccupancyGrid: cannot write " + file.string());
  }
  export_pgm(out);
}

}  // namespace omninav
