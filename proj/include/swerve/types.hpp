#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace swerve {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

/// Per-wheel quantity laid out as axle (row) x side (col 0=left, 1=right).
using WheelMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Thrown when a parameter set violates one of its invariants.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

/// Physical plant constants: masses, geometry, inertia, wheel positions.
struct VehicleParams {
  double mass = 12000.0;         // kg
  double yaw_inertia = 80000.0;  // kg m^2, about the body z axis
  int axle_count = 2;            // n
  std::vector<double> wheel_x = {3.0, -3.0};  // longitudinal offsets, m, one per axle
  std::array<double, 2> wheel_y = {1.0, -1.0};  // lateral offsets, m (left, right)

  int wheel_count() const { return 2 * axle_count; }
  Vec2 wheel_position(int axle, int side) const {
    return {wheel_x[static_cast<size_t>(axle)], wheel_y[static_cast<size_t>(side)]};
  }
  void validate() const;
};

/// One empirical force curve f(xi) = D sin(C atan(B xi - E (B xi - atan(B xi)))).
struct PacejkaCoeffs {
  double stiffness_b = 10.0;  // B
  double shape_c = 1.9;       // C
  double peak_d = 0.0;        // D, N (amplitude bound of the curve)
  double curvature_e = 0.97;  // E
};

/// Tire force and wear constants. The longitudinal curve maps slip ratio to
/// force, the lateral curve maps slip angle to force; both share the same
/// empirical shape with separate coefficient sets.
struct TireParams {
  PacejkaCoeffs longitudinal{10.0, 1.9, 0.0, 0.97};
  PacejkaCoeffs lateral{8.5, 1.4, 0.0, -1.0};
  double wheel_radius = 0.5;      // r_w, m
  double steer_loss_coeff = 0.01; // k_t, m
  double vertical_load = 0.0;     // F_N per wheel, N

  void validate() const;
};

/// Actuator ranges. Drive rates are forward-only (min fixed at zero); the
/// steering modules swing a quarter turn each way, which is what lets the
/// platform crab sideways or recover from large heading offsets.
struct Limits {
  double steer_rate_min = -1.0;   // rad/s
  double steer_rate_max = 1.0;
  double drive_min = 0.0;         // rad/s
  double drive_max = 40.0;
  double steer_angle_min = -1.5707963267948966;  // rad
  double steer_angle_max = 1.5707963267948966;

  void validate() const;
};

/// Vehicle pose and motion in the global frame plus per-wheel steering angles.
/// The heading is stored unwrapped (no modular reduction) so heading error
/// statistics stay continuous across full turns.
struct VehicleState {
  Vec3 pose = Vec3::Zero();      // x_G, y_G, heading (rad, unwrapped)
  Vec3 velocity = Vec3::Zero();  // xdot_G, ydot_G, heading rate
  WheelMatrix steer_angles;      // n x 2, rad

  int axle_count() const { return static_cast<int>(steer_angles.rows()); }
};

/// Everything the plant and the controllers need to know about the vehicle.
struct VehicleModel {
  VehicleParams vehicle;
  TireParams tire;
  Limits limits;

  void validate() const {
    vehicle.validate();
    tire.validate();
    limits.validate();
  }
};

/// Creates a zeroed state sized for the given vehicle.
VehicleState make_state(const VehicleParams& params);

/// Commanded per-wheel drive and steering angular velocities.
struct ControlVector {
  WheelMatrix drive_rates;  // n x 2, rad/s
  WheelMatrix steer_rates;  // n x 2, rad/s
};

ControlVector make_control(int axle_count);

/// Clamps every commanded rate into the actuator ranges. Sets *changed when
/// any entry moved. Idempotent.
ControlVector clamp_control(const ControlVector& control, const Limits& limits,
                            bool* changed = nullptr);

/// Planar rotation by `angle`: [[cos, -sin], [sin, cos]]. Throws on
/// non-finite input.
Mat2 rotation2d(double angle);

}  // namespace swerve
