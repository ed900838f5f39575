#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "omninav/core/types.hpp"

namespace omninav {

// Simulator ground truth: a boolean occupancy raster. Cell (0,0) is the
// bottom-left cell, covering world coordinates [0,res) x [0,res). Map files
// store rows top-down; the loader flips them. The world does not have to be
// enclosed by walls: rays and poses can leave the extent.
class WorldModel2D {
 public:
  WorldModel2D(int width, int height, double resolution);

  // ASCII format: first line "resolution=<meters>", then one row per line,
  // '#' = occupied, '.' = free, row 0 = top of the map.
  static WorldModel2D from_ascii(std::istream& in);
  // Binary PGM (P5), 8-bit: pixel < 128 = occupied. resolution must be
  // supplied since PGM carries no scale.
  static WorldModel2D from_pgm(std::istream& in, double resolution);
  // Dispatches on extension: ".pgm" binary, anything else ASCII.
  static WorldModel2D load(const std::filesystem::path& file, double pgm_resolution = 0.1);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double extent_x() const { return width_ * resolution_; }
  double extent_y() const { return height_ * resolution_; }

  bool in_bounds(double x, double y) const;
  bool cell_in_bounds(GridIndex c) const;

  void set_occupied(GridIndex c, bool occupied);
  // Out-of-bounds cells read as free.
  bool occupied_cell(GridIndex c) const;
  bool occupied_at(double x, double y) const;

  GridIndex cell_of(double x, double y) const;
  Point2D cell_center(GridIndex c) const;

  int occupied_count() const;

 private:
  int width_;
  int height_;
  double resolution_;
  std::vector<std::uint8_t> cells_;  // row-major, row 0 = bottom
};

}  // namespace omninav
