#pragma once

#include <utility>

#include "swerve/tire.hpp"
#include "swerve/types.hpp"

namespace swerve {

/// Rigid-body acceleration in the global frame: (x, y, heading).
struct Acceleration {
  Vec3 accel_global = Vec3::Zero();  // m/s^2, m/s^2, rad/s^2
};

/// Ground-truth integrator configuration.
struct PlantSettings {
  double dt = 0.01;          // control period, s
  int substeps = 8;          // RK4 sub-intervals per control period
  double actuator_lag = 0.0; // first-order lag on commanded rates, s (0 = ideal)

  void validate() const;
};

/// Per-step telemetry raised by the plant.
struct PlantStepFlags {
  bool control_clamped = false;  // commanded rates fell outside Limits
  bool steer_saturated = false;  // some steering angle pinned at its bound
  bool low_speed = false;        // slip guard engaged on some wheel
};

/// Net acceleration from all tire forces, Newton/Euler balance about the CoM.
/// Per wheel: slip quantities, wheel-frame forces, rotate through the steering
/// angle into the body frame, accumulate force/mass and moment/yaw-inertia,
/// then rotate the linear part through the heading into the global frame.
Acceleration body_acceleration(const VehicleState& state, const WheelMatrix& drive_rates,
                               const VehicleModel& model, bool* low_speed = nullptr);

/// Steering rate actually applied at a wheel: zero when the angle is pinned
/// at a bound and the command pushes further out.
double guarded_steer_rate(double steer_angle, double rate, const Limits& limits);

/// body_acceleration plus the summed instantaneous wear power, sharing one
/// per-wheel slip evaluation. Wear uses the guarded steering rates, so a
/// pinned wheel contributes no steering-loss power.
Acceleration accel_and_wear(const VehicleState& state, const ControlVector& control,
                            const VehicleModel& model, WearPower* wear,
                            bool* low_speed = nullptr);

/// Advances one control period with classical RK4 over `substeps`
/// sub-intervals, integrating pose, velocity and steering angles together.
/// Steering angles are hard-clamped at their bounds (integration freezes at
/// the bound instead of winding up). Returns the next state and the
/// trapezoid-averaged wear power over the step, so wear work accumulates as
/// power * dt.
///
/// With actuator_lag > 0 the applied rates relax exponentially from
/// *prev_applied toward the command; *applied_out receives the rates in
/// effect at the end of the step for chaining.
std::pair<VehicleState, WearPower> plant_step(const VehicleState& state,
                                              const ControlVector& control,
                                              const PlantSettings& settings,
                                              const VehicleModel& model,
                                              PlantStepFlags* flags = nullptr,
                                              const ControlVector* prev_applied = nullptr,
                                              ControlVector* applied_out = nullptr);

}  // namespace swerve
