#include "doctest.h"

#include "swerve/baseline.hpp"
#include "swerve/config.hpp"
#include "swerve/tire.hpp"

#include <cmath>
#include <random>

using namespace swerve;

namespace {

VehicleModel nominal_model() { return default_config().model; }

Limits wide_steering() {
  Limits lim;
  lim.steer_angle_min = -M_PI;
  lim.steer_angle_max = M_PI;
  return lim;
}

}  // namespace

TEST_CASE("pure forward twist drives all wheels straight") {
  const VehicleModel m = nominal_model();
  const WheelCommand cmd =
      inverse_kinematics(BodyTwist{1.0, 0.0, 0.0}, m.vehicle, m.tire, m.limits);
  CHECK(cmd.steer_angles.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cmd.drive_rates.minCoeff() == doctest::Approx(2.0));  // 1 / 0.5
  CHECK(cmd.drive_rates.maxCoeff() == doctest::Approx(2.0));
}

TEST_CASE("pure spin aims each wheel tangent to its circle") {
  const VehicleModel m = nominal_model();
  const WheelCommand cmd = inverse_kinematics(BodyTwist{0.0, 0.0, 1.0}, m.vehicle,
                                              m.tire, wide_steering());
  // Wheel (0, 0) sits at (3, 1): ground velocity (-1, 3).
  CHECK(cmd.steer_angles(0, 0) == doctest::Approx(std::atan2(3.0, -1.0)));
  CHECK(cmd.drive_rates(0, 0) == doctest::Approx(std::sqrt(10.0) / 0.5));
}

TEST_CASE("all wheels stay perpendicular to the spin center") {
  const VehicleModel m = nominal_model();
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int k = 0; k < 100; ++k) {
    BodyTwist twist{3.0 * u(rng), 3.0 * u(rng), 0.0};
    twist.omega = u(rng) + (u(rng) > 0 ? 1.5 : -1.5);  // keep a finite ICR
    const WheelCommand cmd =
        inverse_kinematics(twist, m.vehicle, m.tire, wide_steering());

    // ICR in the body frame for twist (vx, vy, w): (-vy/w, vx/w).
    const Vec2 icr(-twist.vy / twist.omega, twist.vx / twist.omega);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const Vec2 arm = m.vehicle.wheel_position(i, j) - icr;
        const Vec2 dir(std::cos(cmd.steer_angles(i, j)), std::sin(cmd.steer_angles(i, j)));
        CHECK(std::abs(arm.dot(dir)) < 1e-9 * (1.0 + arm.norm()));
      }
    }
  }
}

TEST_CASE("inverse kinematics realizes the twist with zero slip") {
  const VehicleModel m = nominal_model();
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int k = 0; k < 100; ++k) {
    const BodyTwist twist{5.0 + u(rng), u(rng), 0.3 * u(rng)};
    const WheelCommand cmd =
        inverse_kinematics(twist, m.vehicle, m.tire, wide_steering());
    const Vec3 body_vel(twist.vx, twist.vy, twist.omega);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const WheelKinematics kin =
            wheel_kinematics(body_vel, m.vehicle.wheel_position(i, j),
                             cmd.steer_angles(i, j), cmd.drive_rates(i, j), m.tire);
        CHECK(std::abs(kin.slip_angle) < 1e-9);
        CHECK(std::abs(kin.slip_ratio) < 1e-9);
      }
    }
  }
}

TEST_CASE("a still vehicle holds its steering") {
  const VehicleModel m = nominal_model();
  WheelMatrix prev(2, 2);
  prev << 0.1, -0.1, 0.2, -0.2;
  const WheelCommand cmd =
      inverse_kinematics(BodyTwist{}, m.vehicle, m.tire, m.limits, &prev);
  CHECK(cmd.steer_angles == prev);
  CHECK(cmd.drive_rates.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reversed drive is used only when allowed and closer") {
  const VehicleModel m = nominal_model();
  Limits lim = wide_steering();

  // Forward-only envelope: the aim angle wins even when the flip is closer.
  WheelMatrix prev = WheelMatrix::Constant(2, 2, -1.0);
  WheelCommand cmd =
      inverse_kinematics(BodyTwist{0.0, 0.0, 1.0}, m.vehicle, m.tire, lim, &prev);
  CHECK(cmd.steer_angles(0, 0) == doctest::Approx(std::atan2(3.0, -1.0)));
  CHECK(cmd.drive_rates(0, 0) > 0.0);

  // With reverse available the flipped candidate is closer to -1 rad.
  lim.drive_min = -lim.drive_max;
  cmd = inverse_kinematics(BodyTwist{0.0, 0.0, 1.0}, m.vehicle, m.tire, lim, &prev);
  CHECK(cmd.steer_angles(0, 0) == doctest::Approx(std::atan2(3.0, -1.0) - M_PI));
  CHECK(cmd.drive_rates(0, 0) == doctest::Approx(-std::sqrt(10.0) / 0.5));

  // The flipped wheel still rolls without sliding: no lateral velocity in
  // the wheel frame and a matched contact speed.
  const WheelKinematics kin = wheel_kinematics(
      Vec3(0.0, 0.0, 1.0), m.vehicle.wheel_position(0, 0), cmd.steer_angles(0, 0),
      cmd.drive_rates(0, 0), m.tire);
  CHECK(std::abs(kin.v_wheel.y()) < 1e-9);
  CHECK(std::abs(kin.slip_ratio) < 1e-9);
}

TEST_CASE("narrow steering range clamps the commanded angle") {
  VehicleModel m = nominal_model();
  m.limits.steer_angle_min = -0.25;
  m.limits.steer_angle_max = 0.25;
  const WheelCommand cmd =
      inverse_kinematics(BodyTwist{0.0, 0.0, 1.0}, m.vehicle, m.tire, m.limits);
  CHECK(cmd.steer_angles.maxCoeff() <= m.limits.steer_angle_max);
  CHECK(cmd.steer_angles.minCoeff() >= m.limits.steer_angle_min);
}

TEST_CASE("kinematic controller is quiet at the reference") {
  const VehicleModel m = nominal_model();
  KinematicController ctl({1.0, 2.0}, m, 0.01);
  CHECK(ctl.horizon() == 1);

  VehicleState s = make_state(m.vehicle);
  s.pose = Vec3(4.0, -2.0, 0.3);
  const std::vector<Vec3> ref(1, s.pose);
  const StepResult r = ctl.step(s, ref);
  CHECK(r.control.drive_rates.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.control.steer_rates.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pure forward offset commands symmetric forward drive") {
  const VehicleModel m = nominal_model();
  KinematicController ctl({1.0, 2.0}, m, 0.01);

  VehicleState s = make_state(m.vehicle);
  const std::vector<Vec3> ref(1, Vec3(1.0, 0.0, 0.0));
  const StepResult r = ctl.step(s, ref);
  CHECK(r.control.steer_rates.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.control.drive_rates.minCoeff() == doctest::Approx(2.0));  // k_p * 1 m / r_w
  CHECK(r.control.drive_rates.maxCoeff() == doctest::Approx(2.0));
}

TEST_CASE("large errors saturate the published rates, not the geometry") {
  const VehicleModel m = nominal_model();
  KinematicController ctl({1.0, 2.0}, m, 0.01);

  VehicleState s = make_state(m.vehicle);
  const std::vector<Vec3> ref(1, Vec3(100.0, 30.0, 0.5));
  const StepResult r = ctl.step(s, ref);
  CHECK(r.control.drive_rates.maxCoeff() <= m.limits.drive_max);
  CHECK(r.control.drive_rates.minCoeff() >= m.limits.drive_min);
  CHECK(r.control.steer_rates.maxCoeff() <= m.limits.steer_rate_max);
  CHECK(r.control.steer_rates.minCoeff() >= m.limits.steer_rate_min);
  // Steering demand far beyond the rate cap pins at the cap exactly.
  CHECK(r.control.steer_rates.cwiseAbs().maxCoeff() == m.limits.steer_rate_max);

  CHECK_THROWS_AS((void)ctl.step(s, std::vector<Vec3>{}), InvariantError);
}

TEST_CASE("drive saturation preserves the wheel speed ratios") {
  const VehicleModel m = nominal_model();
  KinematicController ctl({1.0, 2.0}, m, 0.01);

  VehicleState s = make_state(m.vehicle);
  // Strong spin + forward demand: outer wheels would exceed the cap.
  const std::vector<Vec3> ref(1, Vec3(50.0, 0.0, 20.0));
  const StepResult r = ctl.step(s, ref);

  const WheelCommand raw = inverse_kinematics(
      BodyTwist{50.0, 0.0, 40.0}, m.vehicle, m.tire, m.limits, &s.steer_angles);
  const double peak = raw.drive_rates.cwiseAbs().maxCoeff();
  REQUIRE(peak > m.limits.drive_max);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(r.control.drive_rates(i, j) ==
            doctest::Approx(raw.drive_rates(i, j) * m.limits.drive_max / peak));
}
