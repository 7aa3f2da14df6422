#include "swerve/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace swerve {

namespace {

constexpr double kStillSpeed = 1e-12;  // m/s, below this a wheel just holds

double wrap_pi(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

}  // namespace

WheelCommand inverse_kinematics(const BodyTwist& twist, const VehicleParams& vehicle,
                                const TireParams& tire, const Limits& limits,
                                const WheelMatrix* prev_steer) {
  if (!std::isfinite(twist.vx) || !std::isfinite(twist.vy) || !std::isfinite(twist.omega))
    throw InvariantError("inverse_kinematics: twist must be finite");

  const int n = vehicle.axle_count;
  WheelCommand cmd;
  cmd.steer_angles = WheelMatrix::Zero(n, 2);
  cmd.drive_rates = WheelMatrix::Zero(n, 2);

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Vec2 pos = vehicle.wheel_position(i, j);
      const double ux = twist.vx - twist.omega * pos.y();
      const double uy = twist.vy + twist.omega * pos.x();
      const double speed = std::hypot(ux, uy);
      const double prev = prev_steer ? (*prev_steer)(i, j) : 0.0;

      if (speed < kStillSpeed) {
        cmd.steer_angles(i, j) = prev;
        continue;
      }

      const double aim = std::atan2(uy, ux);
      double best_angle = aim;
      double best_rate = speed / tire.wheel_radius;
      if (limits.drive_min < 0.0) {
        // Reversed-drive candidate: same ground velocity, wheel flipped.
        const double flipped = wrap_pi(aim + M_PI);
        const auto in_range = [&](double a) {
          return a >= limits.steer_angle_min && a <= limits.steer_angle_max;
        };
        const bool aim_ok = in_range(aim);
        const bool flip_ok = in_range(flipped);
        const bool prefer_flip = std::abs(flipped - prev) < std::abs(aim - prev);
        if ((flip_ok && !aim_ok) || (prefer_flip && (flip_ok || !aim_ok))) {
          best_angle = flipped;
          best_rate = -best_rate;
        }
      }
      cmd.steer_angles(i, j) =
          std::clamp(best_angle, limits.steer_angle_min, limits.steer_angle_max);
      cmd.drive_rates(i, j) = best_rate;
    }
  }
  return cmd;
}

KinematicController::KinematicController(const Gains& gains, const VehicleModel& model,
                                         double dt)
    : gains_(gains), model_(model), dt_(dt) {
  model_.validate();
  if (!(std::isfinite(dt) && dt > 0.0))
    throw InvariantError("KinematicController: dt must be > 0");
}

StepResult KinematicController::step(const VehicleState& state,
                                     std::span<const Vec3> reference) {
  if (reference.empty())
    throw InvariantError("KinematicController: empty reference window");
  const Vec3& target = reference[0];

  const double ex = target(0) - state.pose(0);
  const double ey = target(1) - state.pose(1);
  const double ephi = target(2) - state.pose(2);

  const double heading = state.pose(2);
  const double ch = std::cos(heading);
  const double sh = std::sin(heading);

  BodyTwist twist;
  twist.vx = gains_.position * (ch * ex + sh * ey);
  twist.vy = gains_.position * (-sh * ex + ch * ey);
  twist.omega = gains_.heading * ephi;

  WheelCommand cmd = inverse_kinematics(twist, model_.vehicle, model_.tire,
                                        model_.limits, &state.steer_angles);

  // Saturate by scaling all wheel speeds together so the steering center of
  // the commanded motion is preserved.
  const double peak = cmd.drive_rates.cwiseAbs().maxCoeff();
  if (peak > model_.limits.drive_max)
    cmd.drive_rates *= model_.limits.drive_max / peak;

  const int n = state.axle_count();
  StepResult r;
  r.control = make_control(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 2; ++j) {
      r.control.drive_rates(i, j) = std::clamp(cmd.drive_rates(i, j),
                                               model_.limits.drive_min,
                                               model_.limits.drive_max);
      const double rate = (cmd.steer_angles(i, j) - state.steer_angles(i, j)) / dt_;
      r.control.steer_rates(i, j) =
          std::clamp(rate, model_.limits.steer_rate_min, model_.limits.steer_rate_max);
    }
  }
  return r;
}

}  // namespace swerve
