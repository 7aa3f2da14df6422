#include "swerve/sa.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "swerve/types.hpp"

namespace swerve {

void SaSettings::validate() const {
  if (!(cooling_rate > 0.0 && cooling_rate < 1.0))
    throw InvariantError("sa.cooling_rate must lie in (0, 1)");
  if (iterations < 1) throw InvariantError("sa.iterations must be >= 1");
  if (moves_per_temp < 1) throw InvariantError("sa.moves_per_temp must be >= 1");
  if (!(perturb_scale > 0.0 && perturb_scale <= 1.0))
    throw InvariantError("sa.perturb_scale must lie in (0, 1]");
  if (!std::isfinite(initial_temp))
    throw InvariantError("sa.initial_temp must be finite");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + (salt + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

using Eigen::VectorXd;

class Mover {
 public:
  Mover(const VectorXd& lower, const VectorXd& upper, double scale,
        std::mt19937_64& rng)
      : lower_(lower), upper_(upper), sigma_(scale * (upper - lower)), rng_(rng) {}

  // Perturbs 1-3 distinct coordinates of x in place.
  void operator()(VectorXd& x) {
    const int dim = static_cast<int>(x.size());
    const int count = std::min<int>(dim, pick_count_(rng_));
    int idx[3] = {-1, -1, -1};
    for (int m = 0; m < count; ++m) {
      int i;
      do {
        i = std::uniform_int_distribution<int>(0, dim - 1)(rng_);
      } while (i == idx[0] || i == idx[1] || i == idx[2]);
      idx[m] = i;
      const double moved = x(i) + sigma_(i) * gauss_(rng_);
      x(i) = std::clamp(moved, lower_(i), upper_(i));
    }
  }

 private:
  const VectorXd& lower_;
  const VectorXd& upper_;
  VectorXd sigma_;
  std::mt19937_64& rng_;
  std::uniform_int_distribution<int> pick_count_{1, 3};
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace

SaResult anneal(const VectorXd& x0, const VectorXd& lower, const VectorXd& upper,
                const std::function<double(const VectorXd&)>& cost,
                const SaSettings& settings) {
  settings.validate();
  if (x0.size() == 0 || x0.size() != lower.size() || x0.size() != upper.size())
    throw InvariantError("anneal: x0/lower/upper sizes must match and be nonempty");
  if ((upper.array() < lower.array()).any())
    throw InvariantError("anneal: upper must be >= lower");

  std::mt19937_64 rng(settings.rng_seed);
  Mover move(lower, upper, settings.perturb_scale, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SaResult result;
  VectorXd current = x0.cwiseMax(lower).cwiseMin(upper);
  double current_cost = cost(current);
  ++result.evaluations;
  result.best = current;
  result.best_cost = current_cost;
  result.x0_cost = current_cost;

  double temp = settings.initial_temp;
  if (temp <= 0.0) {
    // Calibrate the start temperature from the local cost spread so the same
    // hyperparameters work across problem scalings.
    constexpr int kProbes = 50;
    double sum = 0.0, sumsq = 0.0;
    for (int p = 0; p < kProbes; ++p) {
      VectorXd probe = current;
      move(probe);
      const double c = cost(probe);
      ++result.evaluations;
      sum += c;
      sumsq += c * c;
      if (c < result.best_cost) {
        result.best_cost = c;
        result.best = probe;
      }
    }
    const double mean = sum / kProbes;
    const double var = std::max(0.0, sumsq / kProbes - mean * mean);
    temp = std::sqrt(var);
    if (!(temp > 0.0)) temp = 1.0;
  }

  for (int level = 0; level < settings.iterations; ++level) {
    for (int m = 0; m < settings.moves_per_temp; ++m) {
      VectorXd candidate = current;
      move(candidate);
      const double c = cost(candidate);
      ++result.evaluations;
      const double delta = c - current_cost;
      if (delta <= 0.0 || unit(rng) < std::exp(-delta / temp)) {
        current = std::move(candidate);
        current_cost = c;
        if (current_cost < result.best_cost) {
          result.best_cost = current_cost;
          result.best = current;
        }
      }
    }
    temp *= settings.cooling_rate;
  }
  return result;
}

}  // namespace swerve
