#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace swerve {

/// Annealer hyperparameters. None of these are physical; they trade solve
/// time against plan quality.
struct SaSettings {
  double initial_temp = 0.0;   // cost units; <= 0 requests auto-scaling
  double cooling_rate = 0.95;  // geometric factor per temperature level
  int iterations = 40;         // temperature levels
  int moves_per_temp = 30;     // proposals per level
  double perturb_scale = 0.2;  // Gaussian sigma as a fraction of each range
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct SaResult {
  Eigen::VectorXd best;
  double best_cost = 0.0;
  double x0_cost = 0.0;  // cost of the (clamped) start point
  long evaluations = 0;  // cost calls, including temperature calibration
};

/// Deterministic seed mixing (splitmix64) so per-step solver seeds derived
/// from one base seed are decorrelated.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

/// Minimizes `cost` over the box [lower, upper] by simulated annealing.
/// Each move perturbs 1-3 uniformly chosen coordinates with Gaussian noise
/// scaled to perturb_scale * (upper - lower), clamps into the box, and is
/// accepted by the Metropolis rule exp(-dJ/temp) under geometric cooling.
/// With initial_temp <= 0 the temperature starts at the standard deviation
/// of 50 random-perturbation costs around x0. Returns the best point ever
/// visited; identical settings give identical results.
SaResult anneal(const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                const Eigen::VectorXd& upper,
                const std::function<double(const Eigen::VectorXd&)>& cost,
                const SaSettings& settings);

}  // namespace swerve
