#include "omninav/sensing/world_model.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace omninav {

WorldModel2D::WorldModel2D(int width, int height, double resolution)
    : width_(width), height_(height), resolution_(resolution) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("WorldModel2D: empty grid");
  }
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("WorldModel2D: resolution must be > 0");
  }
  cells_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

WorldModel2D WorldModel2D::from_ascii(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("map: empty file");
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  const std::string prefix = "resolution=";
  if (line.rfind(prefix, 0) != 0) {
    throw std::invalid_argument("map: first line must be resolution=<meters>");
  }
  double resolution = 0.0;
  try {
    resolution = std::stod(line.substr(prefix.size()));
  } catch (const std::exception&) {
    throw std::invalid_argument("map: unparseable resolution");
  }
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("map: resolution must be > 0");
  }

  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    rows.push_back(line);
  }
  if (rows.empty()) {
    throw std::invalid_argument("map: no grid rows");
  }
  const std::size_t width = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != width) {
      throw std::invalid_argument("map: ragged rows");
    }
  }

  WorldModel2D w(static_cast<int>(width), static_cast<int>(rows.size()), resolution);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const int row = static_cast<int>(rows.size() - 1 - j);  // file row 0 = top
    for (std::size_t i = 0; i < width; ++i) {
      const char ch = rows[j][i];
      if (ch == '#') {
        w.set_occupied({static_cast<int>(i), row}, true);
      } else if (ch != '.') {
        throw std::invalid_argument("map: invalid cell character '" + std::string(1, ch) + "'");
      }
    }
  }
  return w;
}

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (tok.empty()) {
    throw std::invalid_argument("pgm: truncated header");
  }
  return tok;
}

int pgm_int(std::istream& in) {
  const std::string tok = pgm_token(in);
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    throw std::invalid_argument("pgm: bad header integer '" + tok + "'");
  }
}

}  // namespace

WorldModel2D WorldModel2D::from_pgm(std::istream& in, double resolution) {
  if (pgm_token(in) != "P5") {
    throw std::invalid_argument("pgm: expected binary P5 magic");
  }
  const int width = pgm_int(in);
  const int height = pgm_int(in);
  const int maxval = pgm_int(in);
  if (maxval <= 0 || maxval > 255) {
    throw std::invalid_argument("pgm: only 8-bit images are supported");
  }
  // Single whitespace byte separates the header from pixel data.
  std::vector<char> data(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  in.read(data.data(), static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw std::invalid_argument("pgm: truncated pixel data");
  }

  WorldModel2D w(width, height, resolution);
  for (int j = 0; j < height; ++j) {
    const int row = height - 1 - j;  // pixel row 0 = top
    for (int i = 0; i < width; ++i) {
      const auto px = static_cast<unsigned char>(
          data[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(i)]);
      if (px < 128) {
        w.set_occupied({i, row}, true);
      }
    }
  }
  return w;
}

WorldModel2D WorldModel2D::load(const std::filesystem::path& file, double pgm_resolution) {
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("map: cannot open " + file.string());
  }
  if (file.extension() == ".pgm") {
    return from_pgm(in, pgm_resolution);
  }
  return from_ascii(in);
}

bool WorldModel2D::in_bounds(double x, double y) const {
  return x >= 0.0 && y >= 0.0 && x < extent_x() && y < extent_y();
}

bool WorldModel2D::cell_in_bounds(GridIndex c) const {
  return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
}

void WorldModel2D::set_occupied(GridIndex c, bool occupied) {
  if (!cell_in_bounds(c)) {
    throw std::out_of_range("WorldModel2D::set_occupied: cell outside grid");
  }
  cells_[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
         static_cast<std::size_t>(c.col)] = occupied ? 1 : 0;
}

bool WorldModel2D::occupied_cell(GridIndex c) const {
  if (!cell_in_bounds(c)) {
    return false;
  }
  return cells_[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(c.col)] != 0;
}

bool WorldModel2D::occupied_at(double x, double y) const {
  if (!in_bounds(x, y)) {
    return false;
  }
  return occupied_cell(cell_of(x, y));
}

GridIndex WorldModel2D::cell_of(double x, double y) const {
  return {static_cast<int>(std::floor(x / resolution_)),
          static_cast<int>(std::floor(y / resolution_))};
}

Point2D WorldModel2D::cell_center(GridIndex c) const {
  return {(c.col + 0.5) * resolution_, (c.row + 0.5) * resolution_};
}

int WorldModel2D::occupied_count() const {
  int n = 0;
  for (auto v : cells_) n += v;
  return n;
}

}  // namespace omninav
