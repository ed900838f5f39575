#include "omninav/control/pd_controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace omninav {

void PdGains::validate() const {
  if (kp_xy < 0.0 || kd_xy < 0.0 || kp_theta < 0.0 || kd_theta < 0.0) {
    throw std::invalid_argument("PdGains: gains must be >= 0");
  }
  if (!(v_max > 0.0) || !(omega_max > 0.0)) {
    throw std::invalid_argument("PdGains: saturations must be > 0");
  }
}

Velocity2D pd_control(const PoseError& error_now, const PoseError& error_prev,
                      const PdGains& gains) {
  gains.validate();
  if (!std::isfinite(error_now.x) || !std::isfinite(error_now.y) ||
      !std::isfinite(error_now.theta) || !std::isfinite(error_prev.x) ||
      !std::isfinite(error_prev.y) || !std::isfinite(error_prev.theta)) {
    throw std::domain_error("pd_control: errors must be finite");
  }
  const double ux = gains.kp_xy * error_now.x + gains.kd_xy * (error_now.x - error_prev.x);
  const double uy = gains.kp_xy * error_now.y + gains.kd_xy * (error_now.y - error_prev.y);
  const double uth =
      gains.kp_theta * error_now.theta + gains.kd_theta * (error_now.theta - error_prev.theta);
  return Velocity2D::global(std::clamp(ux, -gains.v_max, gains.v_max),
                            std::clamp(uy, -gains.v_max, gains.v_max),
                            std::clamp(uth, -gains.omega_max, gains.omega_max));
}

}  // namespace omninav
