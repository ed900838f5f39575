#include "omninav/localization/particle_filter.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "omninav/core/format.hpp"

namespace omninav {

ParticleSet ParticleSet::at_pose(const Pose2D& start, std::size_t count) {
  if (count == 0) {
    throw std::invalid_argument("ParticleSet: count must be > 0");
  }
  ParticleSet ps;
  ps.particles.assign(count, {start, 1.0 / static_cast<double>(count)});
  return ps;
}

double ParticleSet::total_weight() const {
  double t = 0.0;
  for (const auto& p : particles) t += p.weight;
  return t;
}

std::size_t ParticleSet::max_weight_index() const {
  if (particles.empty()) {
    throw std::logic_error("ParticleSet: empty set");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < particles.size(); ++i) {
    if (particles[i].weight > particles[best].weight) {
      best = i;
    }
  }
  return best;
}

void MotionNoise::validate() const {
  if (sigma_x < 0.0 || sigma_y < 0.0 || sigma_theta < 0.0) {
    throw std::invalid_argument("MotionNoise: spreads must be >= 0");
  }
}

void ResampleParams::validate() const {
  if (!(alpha_slow > 0.0) || !(alpha_slow < alpha_fast)) {
    throw std::invalid_argument("ResampleParams: need 0 < alpha_slow < alpha_fast");
  }
  if (omega_floor < 0.0 || omega_floor > 1.0) {
    throw std::invalid_argument("ResampleParams: omega_floor must be in [0, 1]");
  }
  if (drift_gamma < 0.0 || theta_eps < 0.0) {
    throw std::invalid_argument("ResampleParams: drift_gamma and theta_eps must be >= 0");
  }
}

void MeasurementConfig::validate() const {
  if (beam_stride < 1) {
    throw std::invalid_argument("MeasurementConfig: beam_stride must be >= 1");
  }
  if (!(p_hit_floor > 0.0)) {
    throw std::invalid_argument("MeasurementConfig: p_hit_floor must be > 0");
  }
  if (!(hit_threshold > 0.0) || !(hit_threshold < 1.0)) {
    throw std::invalid_argument("MeasurementConfig: hit_threshold must be in (0, 1)");
  }
  if (!(saturation > 0.0)) {
    throw std::invalid_argument("MeasurementConfig: saturation must be > 0");
  }
}

void ClusterParams::validate() const {
  if (k < 1 || epochs < 1) {
    throw std::invalid_argument("ClusterParams: k and epochs must be >= 1");
  }
}

void motion_model(const Velocity2D& v_global, ParticleSet& ps, const MotionNoise& noise,
                  RandomSource& rs) {
  v_global.require_frame(Frame::Global, "motion_model");
  for (auto& p : ps.particles) {
    const double th = p.pose.theta;
    const double c = std::cos(th);
    const double s = std::sin(th);
    // Into the particle's local frame, noise each axis, back out.
    const double lx = c * v_global.vx + s * v_global.vy;
    const double ly = -s * v_global.vx + c * v_global.vy;
    const double nx = lx * rs.gaussian(1.0 - noise.mean_offset_x, noise.sigma_x);
    const double ny = ly * rs.gaussian(1.0 - noise.mean_offset_y, noise.sigma_y);
    const double nth =
        v_global.omega * rs.gaussian(1.0 - noise.mean_offset_theta, noise.sigma_theta);
    p.pose.x += c * nx - s * ny;
    p.pose.y += s * nx + c * ny;
    p.pose.theta = normalize_angle(th + nth);
  }
}

double beam_weight_kernel(double x, double saturation) {
  if (x < 0.0) {
    throw std::domain_error("beam_weight_kernel: negative input");
  }
  if (x > 700.0) {  // exp would overflow; far past the cap anyway
    return saturation;
  }
  const double x2 = x * x;
  const double x4 = x2 * x2;
  return std::min(x4 * x4 + std::exp(x), saturation);
}

void measurement_model(const LidarScan& scan, ParticleSet& ps, const OccupancyGrid& map,
                       const ResampleParams& rp, const MeasurementConfig& mc) {
  if (scan.beams.empty()) {
    throw std::logic_error("measurement_model: empty scan");
  }
  if (ps.particles.empty()) {
    throw std::logic_error("measurement_model: empty particle set");
  }
  mc.validate();

  const double dl = mc.ray_step > 0.0 ? mc.ray_step : map.resolution() / 2.0;
  const auto march_steps = static_cast<long>(std::floor(scan.range_max / dl));
  const double occupied_log_odds = prob_to_log_odds(mc.hit_threshold);

  double total = 0.0;
  for (auto& p : ps.particles) {
    double z_bar = 0.0;
    int used = 0;
    for (std::size_t n = 0; n < scan.beams.size();
         n += static_cast<std::size_t>(mc.beam_stride)) {
      const auto& beam = scan.beams[n];
      const double world_angle = p.pose.theta + scan.mount_rotation + beam.angle;
      const double cx = std::cos(world_angle);
      const double cy = std::sin(world_angle);

      // Expected range: march until the map says obstacle or range runs out.
      double expected = scan.range_max;
      bool hit = false;
      for (long i = 0; i <= march_steps; ++i) {
        const double l = static_cast<double>(i) * dl;
        if (map.log_odds_at({p.pose.x + l * cx, p.pose.y + l * cy}) >= occupied_log_odds) {
          expected = l;
          hit = true;
          break;
        }
      }

      if (hit && expected < scan.range_max) {
        const double p_hit =
            std::max(map.occupancy_at({p.pose.x + beam.range * cx, p.pose.y + beam.range * cy}),
                     mc.p_hit_floor);
        const double eps = std::abs(beam.range - expected);
        z_bar += beam_weight_kernel(eps / p_hit, mc.saturation);
      } else {
        z_bar += mc.saturation;
      }
      ++used;
    }
    z_bar /= static_cast<double>(used);
    p.weight = 1.0 / z_bar;
    total += p.weight;
  }

  const double w_avg = total / static_cast<double>(ps.size());
  ps.w_slow += rp.alpha_slow * (w_avg - ps.w_slow);
  ps.w_fast += rp.alpha_fast * (w_avg - ps.w_fast);

  for (auto& p : ps.particles) {
    p.weight /= total;
  }
}

double injection_probability(double w_fast, double w_slow, double omega_floor) {
  if (w_slow == 0.0) {
    return omega_floor;
  }
  return std::max(omega_floor, 1.0 - w_fast / w_slow);
}

std::vector<std::size_t> low_variance_select(const std::vector<double>& weights, double r) {
  const std::size_t m_count = weights.size();
  if (m_count == 0) {
    throw std::logic_error("low_variance_select: no weights");
  }
  std::vector<std::size_t> picks(m_count);
  std::size_t idx = 0;
  double cum = weights[0];
  for (std::size_t m = 0; m < m_count; ++m) {
    const double u = r + static_cast<double>(m) / static_cast<double>(m_count);
    while (u > cum && idx + 1 < m_count) {
      ++idx;
      cum += weights[idx];
    }
    picks[m] = idx;
  }
  return picks;
}

namespace {

std::vector<Point2D> free_cell_centers(const OccupancyGrid& map) {
  std::vector<Point2D> cells;
  for (int r = 0; r < map.height(); ++r) {
    for (int c = 0; c < map.width(); ++c) {
      if (log_odds_to_prob(map.log_odds_cell({c, r})) < 0.35) {
        cells.push_back(map.cell_center({c, r}));
      }
    }
  }
  return cells;
}

}  // namespace

void resample(ParticleSet& ps, const ResampleParams& rp, const OccupancyGrid& map,
              RandomSource& rs) {
  const std::size_t m_count = ps.size();
  if (m_count == 0) {
    throw std::logic_error("resample: empty particle set");
  }
  const double p_inject = injection_probability(ps.w_fast, ps.w_slow, rp.omega_floor);
  const double r = rs.uniform(0.0, 1.0 / static_cast<double>(m_count));

  std::vector<double> weights(m_count);
  for (std::size_t i = 0; i < m_count; ++i) {
    weights[i] = ps.particles[i].weight;
  }
  const auto picks = low_variance_select(weights, r);

  std::vector<Point2D> free_cells;
  bool free_cells_ready = false;

  std::vector<Particle> out;
  out.reserve(m_count);
  for (std::size_t m = 0; m < m_count; ++m) {
    const bool inject = p_inject > 0.0 && rs.uniform_double() < p_inject;
    if (!inject) {
      out.push_back(ps.particles[picks[m]]);
      continue;
    }
    if (!free_cells_ready) {
      free_cells = free_cell_centers(map);
      free_cells_ready = true;
    }
    Point2D target{};
    if (!free_cells.empty()) {
      target = free_cells[rs.uniform_index(free_cells.size())];
    } else {
      const Point2D o = map.origin();
      const double res = map.resolution();
      target.x = rs.uniform(o.x - res / 2.0, o.x + (map.width() - 0.5) * res);
      target.y = rs.uniform(o.y - res / 2.0, o.y + (map.height() - 0.5) * res);
    }
    const Particle& base = ps.particles[m];
    double dx = target.x - base.pose.x;
    double dy = target.y - base.pose.y;
    const double len = std::hypot(dx, dy);
    if (len > 0.0) {
      dx /= len;
      dy /= len;
    } else {
      dx = 0.0;
      dy = 0.0;
    }
    const double theta =
        rs.uniform(base.pose.theta - rp.theta_eps, base.pose.theta + rp.theta_eps);
    out.push_back({Pose2D{base.pose.x + rp.drift_gamma * dx, base.pose.y + rp.drift_gamma * dy,
                          theta},
                   base.weight / static_cast<double>(m_count)});
  }

  double total = 0.0;
  for (const auto& p : out) total += p.weight;
  if (total > 0.0) {
    for (auto& p : out) p.weight /= total;
  } else {
    for (auto& p : out) p.weight = 1.0 / static_cast<double>(m_count);
  }
  ps.particles = std::move(out);
}

Pose2D kmeans_extract(const ParticleSet& ps, const ClusterParams& cp, RandomSource& rs) {
  cp.validate();
  const std::size_t m_count = ps.size();
  if (m_count < cp.k) {
    throw std::invalid_argument("kmeans_extract: fewer particles than clusters");
  }

  struct Centroid {
    double x = 0.0, y = 0.0, theta = 0.0;
  };
  std::vector<Centroid> centroids(cp.k);

  // Weighted seeding.
  const double total = ps.total_weight();
  for (auto& c : centroids) {
    std::size_t pick = 0;
    if (total > 0.0) {
      const double u = rs.uniform_double() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < m_count; ++i) {
        cum += ps.particles[i].weight;
        if (cum >= u) {
          pick = i;
          break;
        }
        pick = i;
      }
    } else {
      pick = rs.uniform_index(m_count);
    }
    const Pose2D& p = ps.particles[pick].pose;
    c = {p.x, p.y, p.theta};
  }

  std::vector<std::size_t> assign(m_count, 0);
  const auto assign_all = [&] {
    for (std::size_t i = 0; i < m_count; ++i) {
      const Pose2D& p = ps.particles[i].pose;
      double best = -1.0;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < cp.k; ++k) {
        const double dth = wrap_to_pi(p.theta - centroids[k].theta);
        const double d = (p.x - centroids[k].x) * (p.x - centroids[k].x) +
                         (p.y - centroids[k].y) * (p.y - centroids[k].y) + dth * dth;
        if (best < 0.0 || d < best) {
          best = d;
          best_k = k;
        }
      }
      assign[i] = best_k;
    }
  };

  for (std::size_t epoch = 0; epoch < cp.epochs; ++epoch) {
    assign_all();
    for (std::size_t k = 0; k < cp.k; ++k) {
      double sx = 0.0, sy = 0.0, ssin = 0.0, scos = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < m_count; ++i) {
        if (assign[i] != k) continue;
        const Pose2D& p = ps.particles[i].pose;
        sx += p.x;
        sy += p.y;
        ssin += std::sin(p.theta);
        scos += std::cos(p.theta);
        ++n;
      }
      if (n == 0) {
        const Pose2D& p = ps.particles[rs.uniform_index(m_count)].pose;
        centroids[k] = {p.x, p.y, p.theta};
      } else {
        centroids[k] = {sx / static_cast<double>(n), sy / static_cast<double>(n),
                        normalize_angle(std::atan2(ssin, scos))};
      }
    }
  }

  assign_all();
  double best_avg = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < cp.k; ++k) {
    double w = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < m_count; ++i) {
      if (assign[i] != k) continue;
      w += ps.particles[i].weight;
      ++n;
    }
    if (n == 0) continue;
    const double avg = w / static_cast<double>(n);
    if (avg > best_avg) {
      best_avg = avg;
      best_k = k;
    }
  }
  return {centroids[best_k].x, centroids[best_k].y, centroids[best_k].theta};
}

Pose2D mcl_step(const Velocity2D& v_global, const LidarScan& scan, ParticleSet& ps,
                const OccupancyGrid& map, const FilterParams& fp, RandomSource& rs) {
  motion_model(v_global, ps, fp.motion, rs);
  measurement_model(scan, ps, map, fp.resample, fp.measurement);
  resample(ps, fp.resample, map, rs);
  return kmeans_extract(ps, fp.cluster, rs);
}

Pose2D slam_step(const Velocity2D& v_global, const LidarScan& scan, ParticleSet& ps,
                 OccupancyGrid& map, const LogOddsParams& lo, bool free_on_max_range,
                 const FilterParams& fp, RandomSource& rs) {
  motion_model(v_global, ps, fp.motion, rs);
  // Mapping pose: best particle by the weights from the previous update.
  const Pose2D mapping_pose = ps.particles[ps.max_weight_index()].pose;
  map.integrate_scan(scan, mapping_pose, lo, free_on_max_range);
  measurement_model(scan, ps, map, fp.resample, fp.measurement);
  resample(ps, fp.resample, map, rs);
  return kmeans_extract(ps, fp.cluster, rs);
}

void write_particles_csv(std::ostream& out, const ParticleSet& ps) {
  out << "m,x,y,theta,weight\n";
  for (std::size_t i = 0; i < ps.particles.size(); ++i) {
    const auto& p = ps.particles[i];
    out << i << ',' << format_double(p.pose.x) << ',' << format_double(p.pose.y) << ','
        << format_double(p.pose.theta) << ',' << format_double(p.weight) << '\n';
  }
}

}  // namespace omninav
