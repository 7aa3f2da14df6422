#pragma once

#include "swerve/types.hpp"

#include <span>

namespace swerve {

/// Below this wheel-point speed the slip definitions are singular: slip angle
/// is defined as zero and the slip-ratio denominator is floored at this value.
inline constexpr double kLowSpeedEps = 0.05;  // m/s

/// Velocities and slip quantities of one wheel.
struct WheelKinematics {
  Vec2 v_body = Vec2::Zero();   // wheel-point velocity, body frame
  Vec2 v_wheel = Vec2::Zero();  // same velocity, wheel frame
  double slip_angle = 0.0;      // alpha, rad
  double slip_ratio = 0.0;      // s, dimensionless
  bool low_speed = false;       // low-speed guard engaged for either quantity
};

/// Ground forces on one wheel, expressed in the wheel frame.
struct WheelForces {
  double fx_wheel = 0.0;  // N, from slip ratio
  double fy_wheel = 0.0;  // N, from slip angle
};

/// Instantaneous wear power split by mechanism. All channels are >= 0.
struct WearPower {
  double p_slip_ratio = 0.0;  // W
  double p_slip_angle = 0.0;  // W
  double p_steer = 0.0;       // W
};

/// Velocity of the wheel mount point in the body frame given the body-frame
/// vehicle velocity (xdot_B, ydot_B, heading rate).
Vec2 wheel_velocity_body(const Vec3& body_velocity, const Vec2& wheel_pos);

/// Slip angle of a wheel steered to `steer_angle` whose mount point moves at
/// `v_body` (body frame). Below the low-speed guard the result is 0 and
/// `low_speed`, if given, is set.
double slip_angle(double steer_angle, const Vec2& v_body, bool* low_speed = nullptr);

/// Slip ratio from commanded drive rate and the longitudinal wheel-frame
/// velocity. The denominator is floored at the low-speed guard.
double slip_ratio(double drive_rate, double wheel_radius, double v_wheel_long,
                  bool* low_speed = nullptr);

/// Empirical force curve D sin(C atan(B xi - E (B xi - atan(B xi)))).
/// Odd in xi and bounded by |D|.
double magic_formula(double xi, const PacejkaCoeffs& coeffs);

/// Full slip kinematics of wheel (axle, side) for a vehicle moving at
/// `body_velocity` (body frame) with the given steering angle and drive rate.
WheelKinematics wheel_kinematics(const Vec3& body_velocity, const Vec2& wheel_pos,
                                 double steer_angle, double drive_rate,
                                 const TireParams& tire);

/// Wheel-frame forces for wheel (axle, side) of `state` under `drive_rate`.
WheelForces wheel_forces(const VehicleState& state, int axle, int side,
                         double drive_rate, const VehicleParams& vehicle,
                         const TireParams& tire);

WheelForces forces_from_kinematics(const WheelKinematics& kin, const TireParams& tire);

/// The three wear-power channels of one wheel. `steer_rate` is the effective
/// steering angular velocity (zero when the steering actuator is pinned at a
/// mechanical stop).
WearPower wear_power(const WheelKinematics& kin, const WheelForces& forces,
                     double drive_rate, double steer_rate, const TireParams& tire);

/// Channel-wise sum over all wheels. `per_wheel` must have exactly
/// 2 * axle_count entries.
WearPower total_wear_power(std::span<const WearPower> per_wheel, int axle_count);

}  // namespace swerve
