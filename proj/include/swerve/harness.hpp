#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swerve/config.hpp"
#include "swerve/controller.hpp"
#include "swerve/tire.hpp"
#include "swerve/types.hpp"

namespace swerve {

/// A reference trajectory on a uniform time grid plus the starting state.
/// reference[k] is the target pose at times[k]; the run executes
/// reference.size() - 1 control steps.
struct Scenario {
  std::string name;
  double dt = 0.01;
  std::vector<double> times;
  std::vector<Vec3> reference;  // (x, y, heading) with unwrapped headings
  VehicleState initial_state;
  std::optional<double> mass_override;  // kg, re-derives tire loads when set

  int steps() const { return reference.empty() ? 0 : static_cast<int>(reference.size()) - 1; }
  double duration() const { return steps() * dt; }
  void validate() const;
};

/// Builds the reference poses for a named profile:
///  - "curve": constant-speed serpentine; the amplitude is sized so the peak
///    steering demand is 70% of the steering-angle limit, and generation
///    fails if the demand would exceed the limit.
///  - "offset_line": straight line along +x at constant speed, heading 0.
std::vector<Vec3> generate_reference(const std::string& kind, double speed_kmh,
                                     double duration_s, double dt,
                                     const VehicleModel& model);

/// Reference plus a consistent initial state (on-trajectory for "curve";
/// 60 degrees of initial heading offset with the velocity along the vehicle
/// heading for "offset_line").
Scenario make_scenario(const std::string& kind, double speed_kmh, double duration_s,
                       const Config& config);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// One executed control step; everything needed to rebuild the run metrics.
struct StepLog {
  double t = 0.0;
  VehicleState state;      // at t, before applying the control
  Vec3 reference = Vec3::Zero();
  ControlVector control;   // commanded
  WearPower wear;          // average total wear power over [t, t+dt)
  double cost = 0.0;
  double tracking_term = 0.0;
  double wear_term = 0.0;
  double initial_cost = 0.0;
  long sa_iters = 0;
  bool clamped = false;
};

/// Accumulated wear work per channel, joules.
struct WearLedger {
  double slip_ratio = 0.0;  // W_s
  double slip_angle = 0.0;  // W_alpha
  double steer = 0.0;       // W_t
  double total = 0.0;       // W_tw = W_s + W_alpha + W_t, exact
};

/// RMS tracking errors in the paper's mixed units.
struct TrackingErrors {
  double x_cm = 0.0;
  double y_cm = 0.0;
  double heading_deg = 0.0;
  double mean = 0.0;  // arithmetic mean of the three above
};

struct RunResult {
  std::string scenario;
  std::string controller;
  double dt = 0.0;
  std::vector<StepLog> log;
  WearLedger wear;
  TrackingErrors errors;
  double omega = 0.0;
};

/// Shipped controllers: "kinematic", "ntwo" (MPC, wear weights zeroed),
/// "two" (MPC with wear weights). Throws InvariantError for unknown names.
std::unique_ptr<Controller> make_controller(const std::string& name, const Config& config);
std::vector<std::string> controller_names();

/// Runs controller_step -> plant_step for every scenario step and computes
/// the metrics. Deterministic for fixed config seeds. A controller exception
/// aborts with the failing step index in the message.
RunResult run_closed_loop(const Scenario& scenario, const std::string& controller,
                          const Config& config);

/// Wear work per channel: each is the sum of average step powers times dt.
WearLedger wear_work(std::span<const StepLog> log, double dt);

/// Per-axis RMSE of the logged state vs reference, in cm / cm / degrees.
TrackingErrors tracking_errors(std::span<const StepLog> log);

/// Balance index: sqrt(W_tw) * e_bar^0.1 for e_bar < 50, else
/// sqrt(W_tw) * e_bar^0.5. Zero wear or zero error gives 0.
double performance_balance(double wear_total, double e_bar);

/// CSV log, one row per step, 12 significant digits. Columns: t, x, y, phi,
/// x_ref, y_ref, phi_ref, per-wheel delta/omega_w/omega_s (axle-major,
/// left before right), P_s, P_alpha, P_t, J, sa_iters, clamped.
void write_csv(const RunResult& result, const std::filesystem::path& path);

/// Reads a log written by write_csv and recomputes the metrics from it.
/// Velocities and solver telemetry beyond J/sa_iters are not stored in the
/// CSV and come back zeroed.
RunResult read_csv(const std::filesystem::path& path);

/// Key=value summary (W_s, W_alpha, W_t, W_tw, e_x_cm, e_y_cm, e_phi_deg,
/// e_bar, omega, plus run identity).
void write_metrics(const RunResult& result, const std::filesystem::path& path);

/// Fast self-check suite behind the `validate` CLI subcommand. Prints one
/// line per check; returns true when everything passes.
bool run_validation_suite(std::ostream& out);

}  // namespace swerve
