#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swerve/controller.hpp"
#include "swerve/dynamics.hpp"
#include "swerve/sa.hpp"
#include "swerve/types.hpp"

namespace swerve {

struct MpcSettings {
  int prediction_horizon = 20;  // N_p, Euler steps looked ahead
  int control_horizon = 5;      // N_c <= N_p, optimized steps
  Vec3 weights_q{1.0, 1.0, 10.0};     // pose-error weights (x, y, heading)
  // Wear-power weights (slip ratio, slip angle, steer).  Wear powers on a
  // multi-tonne vehicle run 1e4..1e6 W while pose errors are O(0.1), so the
  // usable range is tiny; 1e-12 cuts accumulated wear more than tenfold on
  // the serpentine benchmark without giving up tracking.
  Vec3 weights_l{1e-12, 1e-12, 1e-12};
  // Prediction period, s. Deliberately coarser than the 0.01 s control loop:
  // 20 steps at 0.05 s give the planner a one-second view, enough to damp the
  // lateral overshoot a 0.2 s view cannot see coming.
  double dt = 0.05;

  void validate() const;
};

/// Candidate solution over the horizon: N_c controls, the N_p predicted
/// states/wear they produce, and the cost of that prediction. predicted and
/// cost are always recomputable from controls via rollout + cost_function.
struct HorizonPlan {
  std::vector<ControlVector> controls;
  std::vector<VehicleState> predicted_states;
  std::vector<WearPower> predicted_wear;
  double cost = 0.0;
};

struct RolloutResult {
  std::vector<VehicleState> states;  // N_p entries, state after each Euler step
  std::vector<WearPower> wear;       // N_p entries, total wear power over each interval
};

/// Forward-Euler prediction: per step, acceleration is evaluated at the
/// current state, then steering angles, velocity and pose advance by
/// delta += T*omega_s (clamped at steer bounds), vel += T*accel,
/// pose += T*vel_old. Controls past control_horizon hold the last entry.
/// wear[k] is the wear power at the state where step k's control is applied.
RolloutResult rollout(const VehicleState& state, std::span<const ControlVector> controls,
                      const MpcSettings& settings, const VehicleModel& model);

/// Split cost: tracking = sum_k err_k' diag(Q) err_k over predicted poses,
/// wear = sum_k P_k' diag(L) P_k over predicted wear. Heading error is a raw
/// unwrapped difference in radians.
struct CostTerms {
  double tracking = 0.0;
  double wear = 0.0;
  double total() const { return tracking + wear; }
};

CostTerms cost_terms(std::span<const VehicleState> predicted,
                     std::span<const WearPower> wear, std::span<const Vec3> reference,
                     const MpcSettings& settings);

/// The scalar J; equals the block-diagonal (Kronecker) quadratic form without
/// materializing the stacked matrices.
double cost_function(std::span<const VehicleState> predicted,
                     std::span<const WearPower> wear, std::span<const Vec3> reference,
                     const MpcSettings& settings);

/// Component-wise clamp of a horizon's controls into Limits. Idempotent.
std::vector<ControlVector> clamp_controls(std::span<const ControlVector> raw,
                                          const Limits& limits);

struct SolveStats {
  long evaluations = 0;
  double initial_cost = 0.0;  // cost of the warm start / nominal start point
};

/// Receding-horizon solve by simulated annealing over the stacked control
/// vector (4n values per control step: drive rates then steer rates, wheels
/// row-major). Starts from the shifted warm start when given, otherwise from
/// a zero-slip rolling nominal. Deterministic for a fixed sa.rng_seed.
HorizonPlan solve(const VehicleState& state, std::span<const Vec3> reference,
                  const HorizonPlan* warm_start, const MpcSettings& mpc,
                  const SaSettings& sa, const VehicleModel& model,
                  SolveStats* stats = nullptr);

/// Receding-horizon shell: solves each step with a per-step derived seed,
/// returns the first control, and keeps the plan as the next warm start.
class MpcController : public Controller {
 public:
  MpcController(const MpcSettings& mpc, const SaSettings& sa, const VehicleModel& model);

  int horizon() const override { return mpc_.prediction_horizon; }
  double reference_spacing() const override { return mpc_.dt; }
  StepResult step(const VehicleState& state, std::span<const Vec3> reference) override;
  void reset() override;

  const HorizonPlan* last_plan() const { return has_plan_ ? &plan_ : nullptr; }

 private:
  MpcSettings mpc_;
  SaSettings sa_;
  VehicleModel model_;
  HorizonPlan plan_;
  bool has_plan_ = false;
  std::uint64_t step_index_ = 0;
};

}  // namespace swerve
