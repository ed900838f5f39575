#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "omninav/core/types.hpp"
#include "omninav/sensing/lidar.hpp"
#include "omninav/sensing/world_model.hpp"

namespace omninav {

// ln(p / (1-p)). Throws std::domain_error unless 0 < p < 1.
double prob_to_log_odds(double p);
// Logistic inverse; total over all finite inputs.
double log_odds_to_prob(double l);

struct LogOddsParams {
  double l_occ = 0.5;
  double l_free = -0.5;
  double l_0 = 0.001;

  static LogOddsParams set_a() { return {0.5, -0.5, 0.001}; }
  static LogOddsParams set_b() { return {0.57536, -1.94591, 0.00492}; }

  // l_occ > 0 > l_free and |l_0| small against both.
  void validate() const;
};

// Log-odds occupancy grid. Cell (0,0) is CENTERED at `origin`; cell (c,r)
// covers the square of side `resolution` around origin + (c,r)*resolution.
// Unobserved cells hold exactly 0 (p = 0.5). Integrating evidence outside the
// current bounds grows the grid toward the needed side (at least doubling),
// preserving world coordinates.
class OccupancyGrid {
 public:
  OccupancyGrid(double resolution, int width, int height, Point2D origin,
                double l_min = -10.0, double l_max = 10.0);

  // Grid covering extent_x * extent_y meters centered on `center`.
  static OccupancyGrid centered(double resolution, double extent_x, double extent_y,
                                Point2D center, double l_min = -10.0, double l_max = 10.0);
  // Fully-known grid from ground truth: occupied cells at l_max, free at
  // l_min; grid cell (c,r) coincides with world cell (c,r).
  static OccupancyGrid from_world(const WorldModel2D& world, double l_min = -10.0,
                                  double l_max = 10.0);

  double resolution() const { return resolution_; }
  int width() const { return width_; }
  int height() const { return height_; }
  Point2D origin() const { return origin_; }
  double l_min() const { return l_min_; }
  double l_max() const { return l_max_; }

  GridIndex cell_of(const Point2D& p) const;
  Point2D cell_center(GridIndex c) const;
  bool cell_in_bounds(GridIndex c) const;
  bool contains(const Point2D& p) const { return cell_in_bounds(cell_of(p)); }

  // Out-of-bounds reads are 0 log-odds / 0.5 probability (unknown).
  double log_odds_cell(GridIndex c) const;
  double log_odds_at(const Point2D& p) const { return log_odds_cell(cell_of(p)); }
  double occupancy_at(const Point2D& p) const;
  bool hit_obstacle(const Point2D& p, double threshold = 0.65) const;

  // Adds clamped evidence, growing the grid if the point is outside.
  void add_log_odds(const Point2D& p, double delta);

  // Per-beam update: beams shorter than range_max mark the endpoint cell
  // occupied (+l_occ - l_0) and march free cells (+l_free - l_0) from the
  // pose at half-cell-offset samples up to one cell short of the endpoint;
  // beams at exactly range_max update nothing unless free_on_max_range.
  void integrate_scan(const LidarScan& scan, const Pose2D& pose, const LogOddsParams& params,
                      bool free_on_max_range = false);

  // P5 PGM, row 0 = top: 0 = occupied (p >= 0.65), 255 = free (p <= 0.35),
  // 128 = unknown.
  void export_pgm(std::ostream& out) const;
  void export_pgm_file(const std::filesystem::path& file) const;

 private:
  void grow_to_include(GridIndex c);
  std::size_t flat(GridIndex c) const;

  double resolution_;
  int width_;
  int height_;
  Point2D origin_;
  double l_min_;
  double l_max_;
  std::vector<double> cells_;  // row-major, row 0 has the lowest y
};

}  // namespace omninav
