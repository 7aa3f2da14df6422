#include "swerve/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swerve {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvariantError(msg);
}

}  // namespace

void VehicleParams::validate() const {
  require(std::isfinite(mass) && mass > 0.0, "vehicle.mass_kg must be > 0");
  require(std::isfinite(yaw_inertia) && yaw_inertia > 0.0,
          "vehicle.yaw_inertia must be > 0");
  require(axle_count >= 1, "vehicle.axle_count must be >= 1");
  if (static_cast<int>(wheel_x.size()) != axle_count) {
    std::ostringstream os;
    os << "vehicle.wheel_x must have exactly axle_count=" << axle_count
       << " entries, got " << wheel_x.size();
    throw InvariantError(os.str());
  }
  for (double x : wheel_x) require(std::isfinite(x), "vehicle.wheel_x entries must be finite");
  for (double y : wheel_y) require(std::isfinite(y), "vehicle.wheel_y entries must be finite");
}

void TireParams::validate() const {
  require(std::isfinite(wheel_radius) && wheel_radius > 0.0, "tire.radius must be > 0");
  require(std::isfinite(vertical_load) && vertical_load > 0.0,
          "tire vertical load must be > 0");
  require(std::isfinite(longitudinal.peak_d) && longitudinal.peak_d > 0.0,
          "tire.D (longitudinal) must be > 0");
  require(std::isfinite(lateral.peak_d) && lateral.peak_d > 0.0,
          "tire.D (lateral) must be > 0");
  require(std::isfinite(steer_loss_coeff) && steer_loss_coeff >= 0.0,
          "tire.k_t must be >= 0");
}

void Limits::validate() const {
  require(steer_rate_min < steer_rate_max, "limits.steer_rate: min must be < max");
  require(drive_min < drive_max, "limits.drive_rate: min must be < max");
  require(steer_angle_min < steer_angle_max, "limits.steer_angle: min must be < max");
  require(drive_min == 0.0, "limits.drive_rate: min is fixed at 0");
}

VehicleState make_state(const VehicleParams& params) {
  VehicleState s;
  s.steer_angles = WheelMatrix::Zero(params.axle_count, 2);
  return s;
}

ControlVector make_control(int axle_count) {
  ControlVector c;
  c.drive_rates = WheelMatrix::Zero(axle_count, 2);
  c.steer_rates = WheelMatrix::Zero(axle_count, 2);
  return c;
}

ControlVector clamp_control(const ControlVector& control, const Limits& limits,
                            bool* changed) {
  ControlVector out = control;
  bool moved = false;
  for (Eigen::Index i = 0; i < out.drive_rates.rows(); ++i) {
    for (Eigen::Index j = 0; j < 2; ++j) {
      const double d = std::clamp(out.drive_rates(i, j), limits.drive_min, limits.drive_max);
      const double s = std::clamp(out.steer_rates(i, j), limits.steer_rate_min, limits.steer_rate_max);
      moved = moved || d != out.drive_rates(i, j) || s != out.steer_rates(i, j);
      out.drive_rates(i, j) = d;
      out.steer_rates(i, j) = s;
    }
  }
  if (changed) *changed = moved;
  return out;
}

Mat2 rotation2d(double angle) {
  if (!std::isfinite(angle)) throw InvariantError("rotation2d: angle must be finite");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

}  // namespace swerve
