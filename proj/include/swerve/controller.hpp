#pragma once

#include <span>

#include "swerve/types.hpp"

namespace swerve {

/// Per-step controller telemetry. Cost fields stay zero for controllers that
/// do not optimize anything.
struct StepResult {
  ControlVector control;
  double cost = 0.0;           // accepted plan cost J
  double tracking_term = 0.0;  // pose-error part of J
  double wear_term = 0.0;      // wear part of J
  double initial_cost = 0.0;   // cost of the solver's start point (warm-start visibility)
  long iterations = 0;         // solver cost evaluations
};

/// Common closed-loop interface: the harness feeds each controller the current
/// state plus a window of upcoming reference poses and applies the returned
/// control to the plant. reference[k] is the target pose (k+1) spacings ahead,
/// so a controller may plan on a coarser clock than it is stepped on.
class Controller {
 public:
  virtual ~Controller() = default;

  /// Number of reference poses the controller wants per step.
  virtual int horizon() const = 0;

  /// Seconds between consecutive window poses (the planning period).
  virtual double reference_spacing() const = 0;

  /// reference.size() >= horizon(); the tail may repeat the final pose.
  virtual StepResult step(const VehicleState& state, std::span<const Vec3> reference) = 0;

  virtual void reset() = 0;
};

}  // namespace swerve
