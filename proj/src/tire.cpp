#include "swerve/tire.hpp"

#include <cmath>
#include <sstream>

namespace swerve {

Vec2 wheel_velocity_body(const Vec3& body_velocity, const Vec2& wheel_pos) {
  return {body_velocity.x() - body_velocity.z() * wheel_pos.y(),
          body_velocity.y() + body_velocity.z() * wheel_pos.x()};
}

double slip_angle(double steer_angle, const Vec2& v_body, bool* low_speed) {
  if (v_body.norm() <= kLowSpeedEps) {
    if (low_speed) *low_speed = true;
    return 0.0;
  }
  return steer_angle - std::atan2(v_body.y(), v_body.x());
}

double slip_ratio(double drive_rate, double wheel_radius, double v_wheel_long,
                  bool* low_speed) {
  double denom = std::abs(v_wheel_long);
  if (denom <= kLowSpeedEps) {
    if (low_speed) *low_speed = true;
    denom = kLowSpeedEps;
  }
  return (drive_rate * wheel_radius - v_wheel_long) / denom;
}

double magic_formula(double xi, const PacejkaCoeffs& c) {
  const double bx = c.stiffness_b * xi;
  const double inner = bx - c.curvature_e * (bx - std::atan(bx));
  return c.peak_d * std::sin(c.shape_c * std::atan(inner));
}

WheelKinematics wheel_kinematics(const Vec3& body_velocity, const Vec2& wheel_pos,
                                 double steer_angle, double drive_rate,
                                 const TireParams& tire) {
  WheelKinematics kin;
  kin.v_body = wheel_velocity_body(body_velocity, wheel_pos);
  // Wheel frame = body frame rotated by the steering angle, so the inverse
  // rotation maps the velocity into the wheel frame.
  const double cd = std::cos(steer_angle);
  const double sd = std::sin(steer_angle);
  kin.v_wheel = {cd * kin.v_body.x() + sd * kin.v_body.y(),
                 -sd * kin.v_body.x() + cd * kin.v_body.y()};
  kin.slip_angle = slip_angle(steer_angle, kin.v_body, &kin.low_speed);
  kin.slip_ratio = slip_ratio(drive_rate, tire.wheel_radius, kin.v_wheel.x(),
                              &kin.low_speed);
  return kin;
}

WheelForces forces_from_kinematics(const WheelKinematics& kin, const TireParams& tire) {
  return {magic_formula(kin.slip_ratio, tire.longitudinal),
          magic_formula(kin.slip_angle, tire.lateral)};
}

WheelForces wheel_forces(const VehicleState& state, int axle, int side,
                         double drive_rate, const VehicleParams& vehicle,
                         const TireParams& tire) {
  const double heading = state.pose.z();
  const double ch = std::cos(heading);
  const double sh = std::sin(heading);
  const Vec3 body_velocity{ch * state.velocity.x() + sh * state.velocity.y(),
                           -sh * state.velocity.x() + ch * state.velocity.y(),
                           state.velocity.z()};
  const WheelKinematics kin =
      wheel_kinematics(body_velocity, vehicle.wheel_position(axle, side),
                       state.steer_angles(axle, side), drive_rate, tire);
  return forces_from_kinematics(kin, tire);
}

WearPower wear_power(const WheelKinematics& kin, const WheelForces& forces,
                     double drive_rate, double steer_rate, const TireParams& tire) {
  WearPower p;
  p.p_slip_ratio =
      std::abs(forces.fx_wheel * (drive_rate * tire.wheel_radius - kin.v_wheel.x()));
  p.p_slip_angle = std::abs(forces.fy_wheel * kin.v_wheel.y());
  p.p_steer = std::abs(tire.steer_loss_coeff * tire.vertical_load * steer_rate);
  return p;
}

WearPower total_wear_power(std::span<const WearPower> per_wheel, int axle_count) {
  const size_t expected = static_cast<size_t>(2 * axle_count);
  if (per_wheel.size() != expected) {
    std::ostringstream os;
    os << "total_wear_power: expected " << expected << " wheel entries, got "
       << per_wheel.size();
    throw InvariantError(os.str());
  }
  WearPower sum;
  for (const WearPower& p : per_wheel) {
    sum.p_slip_ratio += p.p_slip_ratio;
    sum.p_slip_angle += p.p_slip_angle;
    sum.p_steer += p.p_steer;
  }
  return sum;
}

}  // namespace swerve
