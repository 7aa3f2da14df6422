#include "swerve/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace swerve {

namespace {

// Force/moment balance evaluated in the body frame; the caller rotates the
// linear part out to the global frame. Optionally accumulates wear power
// (needs the steering rates actually applied at this instant).
Vec3 acceleration_impl(const Vec3& pose, const Vec3& velocity, const WheelMatrix& steer,
                       const WheelMatrix& drive, const VehicleModel& model,
                       const WheelMatrix* steer_rates, WearPower* wear, bool* low_speed) {
  const double heading = pose(2);
  const double ch = std::cos(heading);
  const double sh = std::sin(heading);
  // global -> body
  const Vec3 v_body(ch * velocity(0) + sh * velocity(1),
                    -sh * velocity(0) + ch * velocity(1), velocity(2));

  double fx_body = 0.0;
  double fy_body = 0.0;
  double moment = 0.0;
  for (int i = 0; i < model.vehicle.axle_count; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Vec2 pos = model.vehicle.wheel_position(i, j);
      const double delta = steer(i, j);
      const WheelKinematics kin =
          wheel_kinematics(v_body, pos, delta, drive(i, j), model.tire);
      if (low_speed && kin.low_speed) *low_speed = true;
      const WheelForces f = forces_from_kinematics(kin, model.tire);
      const double cd = std::cos(delta);
      const double sd = std::sin(delta);
      const double fxb = cd * f.fx_wheel - sd * f.fy_wheel;
      const double fyb = sd * f.fx_wheel + cd * f.fy_wheel;
      fx_body += fxb;
      fy_body += fyb;
      moment += pos.x() * fyb - pos.y() * fxb;
      if (wear && steer_rates) {
        const WearPower p =
            wear_power(kin, f, drive(i, j), (*steer_rates)(i, j), model.tire);
        wear->p_slip_ratio += p.p_slip_ratio;
        wear->p_slip_angle += p.p_slip_angle;
        wear->p_steer += p.p_steer;
      }
    }
  }
  // body -> global for the linear part
  return Vec3((ch * fx_body - sh * fy_body) / model.vehicle.mass,
              (sh * fx_body + ch * fy_body) / model.vehicle.mass,
              moment / model.vehicle.yaw_inertia);
}

struct Deriv {
  Vec3 dpose;
  Vec3 dvel;
  WheelMatrix dsteer;
};

}  // namespace

double guarded_steer_rate(double steer_angle, double rate, const Limits& limits) {
  if (steer_angle >= limits.steer_angle_max && rate > 0.0) return 0.0;
  if (steer_angle <= limits.steer_angle_min && rate < 0.0) return 0.0;
  return rate;
}

Acceleration accel_and_wear(const VehicleState& state, const ControlVector& control,
                            const VehicleModel& model, WearPower* wear,
                            bool* low_speed) {
  Acceleration a;
  if (!wear) {
    a.accel_global = acceleration_impl(state.pose, state.velocity, state.steer_angles,
                                       control.drive_rates, model, nullptr, nullptr,
                                       low_speed);
    return a;
  }
  const int n = state.axle_count();
  WheelMatrix effective(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j)
      effective(i, j) =
          guarded_steer_rate(state.steer_angles(i, j), control.steer_rates(i, j),
                             model.limits);
  *wear = WearPower{};
  a.accel_global = acceleration_impl(state.pose, state.velocity, state.steer_angles,
                                     control.drive_rates, model, &effective, wear,
                                     low_speed);
  return a;
}

void PlantSettings::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw InvariantError("sim.dt must be > 0");
  if (substeps < 1) throw InvariantError("plant substeps must be >= 1");
  if (!(std::isfinite(actuator_lag) && actuator_lag >= 0.0))
    throw InvariantError("plant actuator_lag must be >= 0");
}

Acceleration body_acceleration(const VehicleState& state, const WheelMatrix& drive_rates,
                               const VehicleModel& model, bool* low_speed) {
  Acceleration a;
  a.accel_global = acceleration_impl(state.pose, state.velocity, state.steer_angles,
                                     drive_rates, model, nullptr, nullptr, low_speed);
  return a;
}

std::pair<VehicleState, WearPower> plant_step(const VehicleState& state,
                                              const ControlVector& control,
                                              const PlantSettings& settings,
                                              const VehicleModel& model,
                                              PlantStepFlags* flags,
                                              const ControlVector* prev_applied,
                                              ControlVector* applied_out) {
  settings.validate();
  const Limits& lim = model.limits;

  bool clamped = false;
  const ControlVector cmd = clamp_control(control, lim, &clamped);
  if (flags) *flags = PlantStepFlags{};
  if (flags && clamped) flags->control_clamped = true;

  const bool lagged = settings.actuator_lag > 0.0 && prev_applied != nullptr;
  // First-order lag has the closed form a(tau) = cmd + (prev - cmd) e^{-tau/lag}
  // while the command is held, so stage rates are evaluated exactly.
  const auto applied_at = [&](double tau) -> ControlVector {
    if (!lagged) return cmd;
    const double decay = std::exp(-tau / settings.actuator_lag);
    ControlVector a = cmd;
    a.drive_rates += (prev_applied->drive_rates - cmd.drive_rates) * decay;
    a.steer_rates += (prev_applied->steer_rates - cmd.steer_rates) * decay;
    return a;
  };

  const int n = state.axle_count();
  const double h = settings.dt / settings.substeps;
  bool low_speed = false;

  const auto deriv = [&](const Vec3& pose, const Vec3& vel, const WheelMatrix& steer,
                         double tau) -> Deriv {
    const ControlVector a = applied_at(tau);
    Deriv d;
    d.dpose = vel;
    d.dvel = acceleration_impl(pose, vel, steer, a.drive_rates, model, nullptr, nullptr,
                               &low_speed);
    d.dsteer = WheelMatrix(n, 2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j)
        d.dsteer(i, j) = guarded_steer_rate(steer(i, j), a.steer_rates(i, j), lim);
    return d;
  };

  // Trapezoid sample of total wear power at a substep boundary.
  const auto wear_at = [&](const VehicleState& s, double tau) -> WearPower {
    WearPower w;
    accel_and_wear(s, applied_at(tau), model, &w, &low_speed);
    return w;
  };

  VehicleState y = state;
  WearPower node = wear_at(y, 0.0);
  double ps = 0.5 * node.p_slip_ratio;
  double pa = 0.5 * node.p_slip_angle;
  double pt = 0.5 * node.p_steer;

  for (int k = 0; k < settings.substeps; ++k) {
    const double tau = k * h;
    const Deriv k1 = deriv(y.pose, y.velocity, y.steer_angles, tau);
    const Deriv k2 = deriv(y.pose + 0.5 * h * k1.dpose, y.velocity + 0.5 * h * k1.dvel,
                           y.steer_angles + 0.5 * h * k1.dsteer, tau + 0.5 * h);
    const Deriv k3 = deriv(y.pose + 0.5 * h * k2.dpose, y.velocity + 0.5 * h * k2.dvel,
                           y.steer_angles + 0.5 * h * k2.dsteer, tau + 0.5 * h);
    const Deriv k4 = deriv(y.pose + h * k3.dpose, y.velocity + h * k3.dvel,
                           y.steer_angles + h * k3.dsteer, tau + h);

    y.pose += (h / 6.0) * (k1.dpose + 2.0 * k2.dpose + 2.0 * k3.dpose + k4.dpose);
    y.velocity += (h / 6.0) * (k1.dvel + 2.0 * k2.dvel + 2.0 * k3.dvel + k4.dvel);
    y.steer_angles +=
        (h / 6.0) * (k1.dsteer + 2.0 * k2.dsteer + 2.0 * k3.dsteer + k4.dsteer);

    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        double& d = y.steer_angles(i, j);
        if (d >= lim.steer_angle_max || d <= lim.steer_angle_min) {
          d = std::clamp(d, lim.steer_angle_min, lim.steer_angle_max);
          if (flags) flags->steer_saturated = true;
        }
      }
    }

    node = wear_at(y, tau + h);
    const double w = (k + 1 == settings.substeps) ? 0.5 : 1.0;
    ps += w * node.p_slip_ratio;
    pa += w * node.p_slip_angle;
    pt += w * node.p_steer;
  }

  if (flags) flags->low_speed = low_speed;
  if (applied_out) *applied_out = applied_at(settings.dt);

  WearPower avg;
  avg.p_slip_ratio = ps / settings.substeps;
  avg.p_slip_angle = pa / settings.substeps;
  avg.p_steer = pt / settings.substeps;
  return {y, avg};
}

}  // namespace swerve
