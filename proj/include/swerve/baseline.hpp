#pragma once

#include "swerve/controller.hpp"
#include "swerve/types.hpp"

namespace swerve {

/// Desired rigid-body motion expressed in the body frame.
struct BodyTwist {
  double vx = 0.0;     // m/s
  double vy = 0.0;     // m/s
  double omega = 0.0;  // rad/s
};

/// Steering angles and signed drive rates realizing a twist with zero slip:
/// every wheel's lateral axis passes through the common instantaneous center
/// of rotation.
struct WheelCommand {
  WheelMatrix steer_angles;  // rad
  WheelMatrix drive_rates;   // rad/s
};

/// Pure geometric inverse kinematics. Per wheel the ground-point velocity is
/// u = (vx - omega*y_w, vy + omega*x_w); the steering angle aims the wheel
/// along u and the drive rate is |u|/r_w. When limits.drive_min < 0 the
/// +-pi flipped angle with reversed drive is considered too, preferring the
/// candidate closest to *prev_steer (or to zero without it). Angles that
/// still fall outside the steering range are clamped. Wheels with |u| ~ 0
/// hold the previous angle at zero drive.
WheelCommand inverse_kinematics(const BodyTwist& twist, const VehicleParams& vehicle,
                                const TireParams& tire, const Limits& limits,
                                const WheelMatrix* prev_steer = nullptr);

/// Pose-error PD shell over inverse_kinematics. The desired twist is the
/// pose error scaled by the gains, rotated into the body frame; wheel speeds
/// are scaled down together when any one exceeds the drive limit (keeping the
/// steering center), and steering rates are the rate-limited pull toward the
/// target angles, (delta_target - delta)/dt.
class KinematicController : public Controller {
 public:
  struct Gains {
    double position = 1.0;  // 1/s, on position error
    double heading = 2.0;   // 1/s, on heading error
  };

  KinematicController(const Gains& gains, const VehicleModel& model, double dt);

  int horizon() const override { return 1; }
  double reference_spacing() const override { return dt_; }
  StepResult step(const VehicleState& state, std::span<const Vec3> reference) override;
  void reset() override {}

 private:
  Gains gains_;
  VehicleModel model_;
  double dt_;
};

}  // namespace swerve
