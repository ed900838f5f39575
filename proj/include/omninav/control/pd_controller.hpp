#pragma once

#include "omninav/core/types.hpp"

namespace omninav {

// Setpoint error in the global frame; theta is expected in (-pi, pi].
struct PoseError {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct PdGains {
  double kp_xy = 1.2;
  double kd_xy = 0.4;
  double kp_theta = 2.0;
  double kd_theta = 0.3;
  // Per-component output clamps; commands are displacements per tick.
  double v_max = 0.05;
  double omega_max = 0.1;

  void validate() const;
};

// u = kp * e + kd * (e - e_prev), per axis, clamped per component. The
// derivative is the raw per-tick difference. Throws std::domain_error on
// non-finite errors.
Velocity2D pd_control(const PoseError& error_now, const PoseError& error_prev,
                      const PdGains& gains);

}  // namespace omninav
