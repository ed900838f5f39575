#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "omninav/core/random.hpp"
#include "omninav/core/types.hpp"
#include "omninav/mapping/occupancy_grid.hpp"
#include "omninav/sensing/lidar.hpp"

namespace omninav {

struct Particle {
  Pose2D pose;
  double weight = 0.0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  // Short- and long-horizon averages of the raw (pre-normalization) mean
  // weight; their ratio drives randomized injection during resampling.
  double w_slow = 0.0;
  double w_fast = 0.0;

  // All particles at the start pose, weight 1/count each.
  static ParticleSet at_pose(const Pose2D& start, std::size_t count);

  std::size_t size() const { return particles.size(); }
  double total_weight() const;
  // Ties break toward the lowest index. Throws std::logic_error when empty.
  std::size_t max_weight_index() const;
};

// Multiplicative per-axis velocity noise r ~ N(1 - mean_offset, sigma).
struct MotionNoise {
  double mean_offset_x = 0.25;
  double mean_offset_y = 0.25;
  double mean_offset_theta = 0.0;
  double sigma_x = 1.5;
  double sigma_y = 1.5;
  double sigma_theta = 0.005;

  void validate() const;
};

struct ResampleParams {
  double alpha_slow = 0.0125;
  double alpha_fast = 62.5;
  double omega_floor = 0.025;          // minimum injection probability
  double drift_gamma = 0.1;            // meters an injected particle drifts
  double theta_eps = deg_to_rad(1.414);  // injected heading perturbation

  void validate() const;
};

struct MeasurementConfig {
  int beam_stride = 1;        // use every beam_stride-th beam
  double ray_step = 0.0;      // expected-range march step; <= 0: map res / 2
  double p_hit_floor = 0.05;  // lower clamp on endpoint occupancy
  double hit_threshold = 0.65;
  double saturation = 1e12;   // kernel cap and the miss penalty E

  void validate() const;
};

struct ClusterParams {
  std::size_t k = 3;
  std::size_t epochs = 100;

  void validate() const;
};

struct FilterParams {
  MotionNoise motion;
  ResampleParams resample;
  ClusterParams cluster;
  MeasurementConfig measurement;
};

// Applies the commanded global-frame displacement to every particle with
// multiplicative noise drawn in its local frame (draw order per particle:
// x, y, theta; sigma = 0 axes draw nothing). Weights are untouched.
void motion_model(const Velocity2D& v_global, ParticleSet& ps, const MotionNoise& noise,
                  RandomSource& rs);

// f(x) = x^8 + e^x, saturated at `saturation`. Throws std::domain_error for
// x < 0.
double beam_weight_kernel(double x, double saturation = 1e12);

// Reweights particles against the scan: per beam, the expected range is
// ray-marched on the map from the particle pose; the error against the
// measured range, scaled by the endpoint occupancy, feeds the kernel. Beams
// whose expected range reaches the scan maximum add the saturation penalty
// instead. Weights are normalized to sum 1; w_fast/w_slow are updated once
// from the pre-normalization mean weight.
void measurement_model(const LidarScan& scan, ParticleSet& ps, const OccupancyGrid& map,
                       const ResampleParams& rp, const MeasurementConfig& mc = {});

// max(omega_floor, 1 - w_fast / w_slow); w_slow == 0 falls back to the floor.
double injection_probability(double w_fast, double w_slow, double omega_floor);

// Low-variance selection: slot m (0-based) picks the smallest index whose
// weight prefix sum reaches r + m / M. Requires r in [0, 1/M).
std::vector<std::size_t> low_variance_select(const std::vector<double>& weights, double r);

// Replaces the set with M slots drawn by low-variance selection; each slot is
// independently replaced (with the injection probability above) by a copy of
// the slot's old particle drifted drift_gamma toward a random free-space
// cell, heading perturbed within theta_eps, weight scaled by 1/M. Weights
// are renormalized afterwards.
void resample(ParticleSet& ps, const ResampleParams& rp, const OccupancyGrid& map,
              RandomSource& rs);

// Lloyd k-means over (x, y, theta) with circular heading means; returns the
// centroid of the cluster with the highest average particle weight. Empty
// clusters are reseeded from a random particle. Requires ps.size() >= cp.k.
Pose2D kmeans_extract(const ParticleSet& ps, const ClusterParams& cp, RandomSource& rs);

// Localization step against a fixed map:
// motion -> measurement -> resample -> cluster extraction.
Pose2D mcl_step(const Velocity2D& v_global, const LidarScan& scan, ParticleSet& ps,
                const OccupancyGrid& map, const FilterParams& fp, RandomSource& rs);

// SLAM step: after the motion update the scan is integrated into the map at
// the best particle's pose (best by the weights carried over from the
// previous update), then measurement -> resample -> cluster extraction.
Pose2D slam_step(const Velocity2D& v_global, const LidarScan& scan, ParticleSet& ps,
                 OccupancyGrid& map, const LogOddsParams& lo, bool free_on_max_range,
                 const FilterParams& fp, RandomSource& rs);

// CSV snapshot "m,x,y,theta,weight", one row per particle.
void write_particles_csv(std::ostream& out, const ParticleSet& ps);

}  // namespace omninav
