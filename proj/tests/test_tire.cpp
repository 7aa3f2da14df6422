#include "doctest.h"

#include "swerve/config.hpp"
#include "swerve/tire.hpp"
#include "swerve/types.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace swerve;

namespace {

TireParams nominal_tire() {
  return default_config().model.tire;  // peaks derived from the 12 t default
}

}  // namespace

TEST_CASE("wheel_velocity_body adds the yaw contribution") {
  CHECK(wheel_velocity_body(Vec3(0, 0, 0), Vec2(3, 1)) == Vec2(0, 0));
  CHECK(wheel_velocity_body(Vec3(5, 0, 0), Vec2(3, 1)) == Vec2(5, 0));

  const Vec2 v = wheel_velocity_body(Vec3(2, 1, 0.5), Vec2(-3, -1));
  CHECK(v.x() == doctest::Approx(2.5));   // 2 - 0.5 * (-1)
  CHECK(v.y() == doctest::Approx(-0.5));  // 1 + 0.5 * (-3)
}

TEST_CASE("slip_angle measures steering against travel direction") {
  CHECK(slip_angle(0.0, Vec2(5, 0)) == 0.0);
  CHECK(slip_angle(0.2, Vec2(1, 0.1)) ==
        doctest::Approx(0.2 - std::atan2(0.1, 1.0)).epsilon(1e-12));

  bool low = false;
  CHECK(slip_angle(0.2, Vec2(0.03, 0.02), &low) == 0.0);
  CHECK(low);
  low = false;
  CHECK(slip_angle(0.2, Vec2(1, 0), &low) != 0.0);
  CHECK_FALSE(low);
}

TEST_CASE("slip_ratio from drive rate and wheel-frame speed") {
  CHECK(slip_ratio(10.0, 0.5, 5.0) == 0.0);
  CHECK(slip_ratio(11.0, 0.5, 5.0) == doctest::Approx(0.1));
  // Reverse rolling under forward drive: (10*0.5 - (-5)) / |-5| = +2. The
  // magnitude-2 slip is what matters; the sign follows from the formula.
  CHECK(slip_ratio(10.0, 0.5, -5.0) == doctest::Approx(2.0));

  bool low = false;
  // Denominator floored at 0.05: (1*0.5 - 0) / 0.05 = 10.
  CHECK(slip_ratio(1.0, 0.5, 0.0, &low) == doctest::Approx(10.0));
  CHECK(low);
}

TEST_CASE("magic_formula shape") {
  PacejkaCoeffs c{10.0, 1.9, 8000.0, 0.97};

  CHECK(magic_formula(0.0, c) == 0.0);

  // Independent scalar evaluation at xi = 0.05.
  {
    const double xi = 0.05;
    const double t1 = c.stiffness_b * xi;
    const double t2 = t1 - std::atan(t1);
    const double expected = c.peak_d * std::sin(c.shape_c * std::atan(t1 - c.curvature_e * t2));
    CHECK(magic_formula(xi, c) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected > 0.0);
    CHECK(expected < c.peak_d);
  }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xi_dist(-3.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    const double xi = xi_dist(rng);
    const double f = magic_formula(xi, c);
    CHECK(f == doctest::Approx(-magic_formula(-xi, c)).epsilon(1e-12));  // odd
    CHECK(std::abs(f) <= c.peak_d + 1e-9);                               // bounded
  }

  // Negative curve amplitude still bounds by |D|.
  PacejkaCoeffs lat{8.5, 1.4, -22072.5, -1.0};
  for (int k = 0; k < 100; ++k) {
    const double xi = xi_dist(rng);
    CHECK(std::abs(magic_formula(xi, lat)) <= std::abs(lat.peak_d) + 1e-9);
  }
}

TEST_CASE("wheel frame is the steered body frame") {
  const TireParams tire = nominal_tire();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 100; ++k) {
    const Vec3 body_vel(u(rng), u(rng), 0.3 * u(rng));
    const Vec2 pos(u(rng), 0.3 * u(rng));
    const double delta = 0.1 * u(rng);
    const WheelKinematics kin = wheel_kinematics(body_vel, pos, delta, u(rng), tire);
    const Vec2 back = rotation2d(delta) * kin.v_wheel;
    CHECK((back - kin.v_body).norm() < 1e-12);
  }
}

TEST_CASE("wheel_forces at rest and in matched rolling vanish") {
  const Config cfg = default_config();
  VehicleState s = make_state(cfg.model.vehicle);

  WheelForces f = wheel_forces(s, 0, 0, 0.0, cfg.model.vehicle, cfg.model.tire);
  CHECK(f.fx_wheel == 0.0);
  CHECK(f.fy_wheel == 0.0);

  // Straight rolling at matched speed: v = 5 m/s, drive 10 rad/s, r = 0.5.
  s.velocity = Vec3(5.0, 0.0, 0.0);
  f = wheel_forces(s, 1, 1, 10.0, cfg.model.vehicle, cfg.model.tire);
  CHECK(f.fx_wheel == 0.0);
  CHECK(f.fy_wheel == 0.0);

  // Heading 60 degrees off the direction of travel: the lateral curve is
  // driven deep into its nonlinear region, close to its amplitude bound.
  s.pose.z() = M_PI / 3.0;
  const double v = 10.0 / 3.6;
  s.velocity = Vec3(v, 0.0, 0.0);
  f = wheel_forces(s, 0, 0, v / cfg.model.tire.wheel_radius, cfg.model.vehicle,
                   cfg.model.tire);
  CHECK(std::abs(f.fy_wheel) > 0.8 * std::abs(cfg.model.tire.lateral.peak_d));
  CHECK(std::abs(f.fy_wheel) <= std::abs(cfg.model.tire.lateral.peak_d));
}

TEST_CASE("wear_power channels") {
  const TireParams tire = nominal_tire();

  // Perfectly aligned rolling with no steering motion dissipates nothing.
  WheelKinematics kin = wheel_kinematics(Vec3(5, 0, 0), Vec2(3, 1), 0.0, 10.0, tire);
  WheelForces f = forces_from_kinematics(kin, tire);
  WearPower p = wear_power(kin, f, 10.0, 0.0, tire);
  CHECK(p.p_slip_ratio == 0.0);
  CHECK(p.p_slip_angle == 0.0);
  CHECK(p.p_steer == 0.0);

  // Steering loss: k_t * F_N * |omega_s| = 0.01 * 29430 * 1.
  p = wear_power(kin, f, 10.0, 1.0, tire);
  CHECK(p.p_steer == doctest::Approx(294.3));
  const WearPower p2 = wear_power(kin, f, 10.0, 2.0, tire);
  CHECK(p2.p_steer == doctest::Approx(2.0 * p.p_steer).epsilon(1e-14));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const Vec3 bv(8.0 * u(rng), 2.0 * u(rng), u(rng));
    const double delta = 0.25 * u(rng);
    const double drive = 20.0 * (u(rng) + 1.0);
    kin = wheel_kinematics(bv, Vec2(3.0 * u(rng), u(rng)), delta, drive, tire);
    f = forces_from_kinematics(kin, tire);
    p = wear_power(kin, f, drive, u(rng), tire);
    CHECK(p.p_slip_ratio >= 0.0);
    CHECK(p.p_slip_angle >= 0.0);
    CHECK(p.p_steer >= 0.0);
  }
}

TEST_CASE("total_wear_power sums per-wheel channels") {
  std::vector<WearPower> per_wheel = {
      {1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}, {7.0, 8.0, 9.0}, {10.0, 11.0, 12.0}};
  const WearPower sum = total_wear_power(per_wheel, 2);
  CHECK(sum.p_slip_ratio == doctest::Approx(22.0));
  CHECK(sum.p_slip_angle == doctest::Approx(26.0));
  CHECK(sum.p_steer == doctest::Approx(30.0));

  CHECK_THROWS_AS((void)total_wear_power(per_wheel, 3), InvariantError);
}
