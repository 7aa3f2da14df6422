#include "swerve/mpc.hpp"

#include <algorithm>
#include <cmath>

#include "swerve/tire.hpp"

namespace swerve {

void MpcSettings::validate() const {
  if (control_horizon < 1 || control_horizon > prediction_horizon)
    throw InvariantError("mpc.control_horizon must satisfy 1 <= N_c <= N_p");
  if (!(weights_q.array() > 0.0).all())
    throw InvariantError("mpc.weights_q entries must be > 0");
  if (!(weights_l.array() >= 0.0).all())
    throw InvariantError("mpc.weights_l entries must be >= 0");
  if (!(std::isfinite(dt) && dt > 0.0)) throw InvariantError("mpc.dt must be > 0");
}

namespace {

// Stacked control layout, per optimized step: drive rates then steer rates,
// wheels row-major. 4n entries per step.
void pack_step(const ControlVector& u, int n, double* out) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 2; ++j) {
      out[i * 2 + j] = u.drive_rates(i, j);
      out[2 * n + i * 2 + j] = u.steer_rates(i, j);
    }
  }
}

void unpack(const Eigen::VectorXd& x, int n, std::vector<ControlVector>& out) {
  const int stride = 4 * n;
  for (std::size_t c = 0; c < out.size(); ++c) {
    ControlVector& u = out[c];
    if (u.drive_rates.rows() != n) u = make_control(n);
    const double* p = x.data() + c * stride;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 2; ++j) {
        u.drive_rates(i, j) = p[i * 2 + j];
        u.steer_rates(i, j) = p[2 * n + i * 2 + j];
      }
    }
  }
}

void rollout_into(const VehicleState& state, std::span<const ControlVector> controls,
                  const MpcSettings& settings, const VehicleModel& model,
                  std::vector<VehicleState>& states, std::vector<WearPower>& wear) {
  const double T = settings.dt;
  const int np = settings.prediction_horizon;
  const int last = static_cast<int>(controls.size()) - 1;
  const Limits& lim = model.limits;
  states.resize(np);
  wear.resize(np);

  VehicleState s = state;
  for (int k = 0; k < np; ++k) {
    const ControlVector& u = controls[std::min(k, last)];
    const Acceleration a = accel_and_wear(s, u, model, &wear[k]);
    s.pose += T * s.velocity;  // explicit Euler: position uses the old velocity
    s.velocity += T * a.accel_global;
    for (int i = 0; i < s.steer_angles.rows(); ++i)
      for (int j = 0; j < 2; ++j)
        s.steer_angles(i, j) = std::clamp(s.steer_angles(i, j) + T * u.steer_rates(i, j),
                                          lim.steer_angle_min, lim.steer_angle_max);
    states[k] = s;
  }
}

// Zero-slip rolling at the current state: drive each wheel at its own
// longitudinal ground speed, hold steering.
ControlVector nominal_control(const VehicleState& state, const VehicleModel& model) {
  const double heading = state.pose(2);
  const double ch = std::cos(heading);
  const double sh = std::sin(heading);
  const Vec3 v_body(ch * state.velocity(0) + sh * state.velocity(1),
                    -sh * state.velocity(0) + ch * state.velocity(1),
                    state.velocity(2));
  const int n = state.axle_count();
  ControlVector u = make_control(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 2; ++j) {
      const WheelKinematics kin =
          wheel_kinematics(v_body, model.vehicle.wheel_position(i, j),
                           state.steer_angles(i, j), 0.0, model.tire);
      u.drive_rates(i, j) = std::clamp(kin.v_wheel(0) / model.tire.wheel_radius,
                                       model.limits.drive_min, model.limits.drive_max);
    }
  }
  return u;
}

}  // namespace

RolloutResult rollout(const VehicleState& state, std::span<const ControlVector> controls,
                      const MpcSettings& settings, const VehicleModel& model) {
  if (controls.empty()) throw InvariantError("rollout: needs at least one control");
  RolloutResult r;
  rollout_into(state, controls, settings, model, r.states, r.wear);
  return r;
}

CostTerms cost_terms(std::span<const VehicleState> predicted,
                     std::span<const WearPower> wear, std::span<const Vec3> reference,
                     const MpcSettings& settings) {
  const std::size_t np = static_cast<std::size_t>(settings.prediction_horizon);
  if (predicted.size() != np || wear.size() != np || reference.size() != np)
    throw InvariantError("cost_function: arrays must have prediction_horizon entries");
  const Vec3& q = settings.weights_q;
  const Vec3& l = settings.weights_l;
  CostTerms terms;
  for (std::size_t k = 0; k < np; ++k) {
    const Vec3 e = predicted[k].pose - reference[k];
    terms.tracking += q(0) * e(0) * e(0) + q(1) * e(1) * e(1) + q(2) * e(2) * e(2);
    const WearPower& p = wear[k];
    terms.wear += l(0) * p.p_slip_ratio * p.p_slip_ratio +
                  l(1) * p.p_slip_angle * p.p_slip_angle + l(2) * p.p_steer * p.p_steer;
  }
  return terms;
}

double cost_function(std::span<const VehicleState> predicted,
                     std::span<const WearPower> wear, std::span<const Vec3> reference,
                     const MpcSettings& settings) {
  const CostTerms t = cost_terms(predicted, wear, reference, settings);
  return t.tracking + t.wear;
}

std::vector<ControlVector> clamp_controls(std::span<const ControlVector> raw,
                                          const Limits& limits) {
  std::vector<ControlVector> out;
  out.reserve(raw.size());
  for (const ControlVector& u : raw) out.push_back(clamp_control(u, limits));
  return out;
}

HorizonPlan solve(const VehicleState& state, std::span<const Vec3> reference,
                  const HorizonPlan* warm_start, const MpcSettings& mpc,
                  const SaSettings& sa, const VehicleModel& model, SolveStats* stats) {
  mpc.validate();
  const int np = mpc.prediction_horizon;
  const int nc = mpc.control_horizon;
  if (static_cast<int>(reference.size()) < np)
    throw InvariantError("solve: reference window shorter than mpc.prediction_horizon");
  const std::span<const Vec3> ref = reference.first(np);

  const int n = state.axle_count();
  const int stride = 4 * n;
  const int dim = stride * nc;

  Eigen::VectorXd lower(dim), upper(dim);
  for (int c = 0; c < nc; ++c) {
    double* lo = lower.data() + c * stride;
    double* hi = upper.data() + c * stride;
    for (int w = 0; w < 2 * n; ++w) {
      lo[w] = model.limits.drive_min;
      hi[w] = model.limits.drive_max;
      lo[2 * n + w] = model.limits.steer_rate_min;
      hi[2 * n + w] = model.limits.steer_rate_max;
    }
  }

  Eigen::VectorXd x0(dim);
  const bool warm = warm_start && static_cast<int>(warm_start->controls.size()) == nc &&
                    warm_start->controls.front().drive_rates.rows() == n;
  if (warm) {
    // Receding-horizon shift: drop the executed first step, repeat the tail.
    for (int c = 0; c < nc; ++c)
      pack_step(warm_start->controls[std::min(c + 1, nc - 1)], n, x0.data() + c * stride);
  } else {
    const ControlVector nominal = nominal_control(state, model);
    for (int c = 0; c < nc; ++c) pack_step(nominal, n, x0.data() + c * stride);
  }

  std::vector<ControlVector> ctrl_ws(nc);
  std::vector<VehicleState> states_ws;
  std::vector<WearPower> wear_ws;
  const auto cost = [&](const Eigen::VectorXd& x) {
    unpack(x, n, ctrl_ws);
    rollout_into(state, ctrl_ws, mpc, model, states_ws, wear_ws);
    return cost_function(states_ws, wear_ws, ref, mpc);
  };

  const SaResult best = anneal(x0, lower, upper, cost, sa);

  HorizonPlan plan;
  plan.controls.resize(nc);
  unpack(best.best, n, plan.controls);
  RolloutResult ro = rollout(state, plan.controls, mpc, model);
  plan.predicted_states = std::move(ro.states);
  plan.predicted_wear = std::move(ro.wear);
  plan.cost = cost_function(plan.predicted_states, plan.predicted_wear, ref, mpc);
  if (stats) {
    stats->evaluations = best.evaluations;
    stats->initial_cost = best.x0_cost;
  }
  return plan;
}

MpcController::MpcController(const MpcSettings& mpc, const SaSettings& sa,
                             const VehicleModel& model)
    : mpc_(mpc), sa_(sa), model_(model) {
  mpc_.validate();
  sa_.validate();
  model_.validate();
}

StepResult MpcController::step(const VehicleState& state,
                               std::span<const Vec3> reference) {
  SaSettings stepped = sa_;
  stepped.rng_seed = mix_seed(sa_.rng_seed, step_index_);
  SolveStats stats;
  plan_ = solve(state, reference, has_plan_ ? &plan_ : nullptr, mpc_, stepped, model_,
                &stats);
  has_plan_ = true;
  ++step_index_;

  const CostTerms terms =
      cost_terms(plan_.predicted_states, plan_.predicted_wear,
                 reference.first(mpc_.prediction_horizon), mpc_);
  StepResult r;
  r.control = plan_.controls.front();
  r.cost = plan_.cost;
  r.tracking_term = terms.tracking;
  r.wear_term = terms.wear;
  r.initial_cost = stats.initial_cost;
  r.iterations = stats.evaluations;
  return r;
}

void MpcController::reset() {
  has_plan_ = false;
  plan_ = HorizonPlan{};
  step_index_ = 0;
}

}  // namespace swerve
