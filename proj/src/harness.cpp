#include "swerve/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "swerve/baseline.hpp"
#include "swerve/dynamics.hpp"
#include "swerve/mpc.hpp"
#include "swerve/sa.hpp"

namespace swerve {

using nlohmann::json;

void Scenario::validate() const {
  if (!(std::isfinite(dt) && dt > 0.0)) throw InvariantError("scenario dt must be > 0");
  if (times.size() != reference.size())
    throw InvariantError("scenario times and reference must have equal length");
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    if (!(times[k + 1] > times[k]) || std::abs(times[k + 1] - times[k] - dt) > 1e-9)
      throw InvariantError("scenario timestamps must increase uniformly by dt");
  }
  for (const Vec3& p : reference)
    if (!p.allFinite()) throw InvariantError("scenario reference poses must be finite");
  if (mass_override && !(*mass_override > 0.0))
    throw InvariantError("scenario mass_override must be > 0");
  if (initial_state.steer_angles.rows() < 1)
    throw InvariantError("scenario initial state needs at least one axle");
}

namespace {

struct CurveShape {
  double amplitude;
  double wavelength = 60.0;  // m along x
  double peak_curvature;
  double steer_demand;  // rad, at the tightest point
};

// Sizes the serpentine against two budgets and takes the tighter one: the
// steering bound keeps the worst-case wheel angle at 70% of the steering
// authority (turn center on the lateral axis: a wheel at (x, y) needs
// atan(x / (R - y)), so R = x / tan(0.7 cap) + y), and the grip bound keeps
// the peak lateral acceleration v^2 * kappa at 3 m/s^2 so the reference stays
// trackable without saturating the tires.
CurveShape size_curve(const VehicleModel& model, double speed) {
  double max_x = 0.0, max_y = 0.0;
  for (double x : model.vehicle.wheel_x) max_x = std::max(max_x, std::abs(x));
  for (double y : model.vehicle.wheel_y) max_y = std::max(max_y, std::abs(y));
  const double cap =
      std::min(-model.limits.steer_angle_min, model.limits.steer_angle_max);
  if (!(cap > 0.0) || max_x <= 0.0)
    throw InvariantError(
        "curve reference infeasible: needs two-sided limits.steer_angle and a "
        "nonzero wheelbase");
  const double t = std::tan(0.7 * cap);
  CurveShape shape;
  shape.peak_curvature =
      std::min(t / (max_x + t * max_y), 3.0 / (speed * speed));
  shape.steer_demand =
      std::atan2(max_x * shape.peak_curvature, 1.0 - max_y * shape.peak_curvature);
  if (!(shape.steer_demand < cap)) {
    std::ostringstream msg;
    msg << "curve reference infeasible: steering demand " << shape.steer_demand
        << " rad exceeds limits.steer_angle " << cap;
    throw InvariantError(msg.str());
  }
  const double w = 2.0 * M_PI / shape.wavelength;
  shape.amplitude = shape.peak_curvature / (w * w);
  return shape;
}

int pose_count(double duration_s, double dt) {
  if (!(duration_s >= 0.0)) throw InvariantError("reference duration must be >= 0");
  return static_cast<int>(std::lround(duration_s / dt)) + 1;
}

std::vector<Vec3> curve_reference(double speed, double duration_s, double dt,
                                  const VehicleModel& model) {
  const CurveShape shape = size_curve(model, speed);
  const double w = 2.0 * M_PI / shape.wavelength;
  const double A = shape.amplitude;
  const int count = pose_count(duration_s, dt);

  // Walk the path at constant ground speed: x'(s) = 1/sqrt(1 + y'(x)^2),
  // integrated with RK4 between poses.
  const auto dxds = [&](double x) {
    const double yp = A * w * std::cos(w * x);
    return 1.0 / std::sqrt(1.0 + yp * yp);
  };
  std::vector<Vec3> poses;
  poses.reserve(count);
  double x = 0.0;
  const int sub = 4;
  const double h = speed * dt / sub;
  for (int k = 0; k < count; ++k) {
    const double yp = A * w * std::cos(w * x);
    poses.emplace_back(x, A * std::sin(w * x), std::atan(yp));
    for (int m = 0; m < sub; ++m) {
      const double k1 = dxds(x);
      const double k2 = dxds(x + 0.5 * h * k1);
      const double k3 = dxds(x + 0.5 * h * k2);
      const double k4 = dxds(x + h * k3);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return poses;
}

std::vector<Vec3> line_reference(double speed, double duration_s, double dt) {
  const int count = pose_count(duration_s, dt);
  std::vector<Vec3> poses;
  poses.reserve(count);
  for (int k = 0; k < count; ++k) poses.emplace_back(speed * k * dt, 0.0, 0.0);
  return poses;
}

}  // namespace

std::vector<Vec3> generate_reference(const std::string& kind, double speed_kmh,
                                     double duration_s, double dt,
                                     const VehicleModel& model) {
  if (!(speed_kmh > 0.0)) throw InvariantError("reference speed must be > 0");
  if (!(dt > 0.0)) throw InvariantError("reference dt must be > 0");
  const double speed = speed_kmh / 3.6;
  if (kind == "curve") return curve_reference(speed, duration_s, dt, model);
  if (kind == "offset_line") return line_reference(speed, duration_s, dt);
  throw InvariantError("unknown reference kind: " + kind +
                       " (have curve, offset_line)");
}

Scenario make_scenario(const std::string& kind, double speed_kmh, double duration_s,
                       const Config& config) {
  Scenario s;
  s.name = kind;
  s.dt = config.plant.dt;
  s.reference = generate_reference(kind, speed_kmh, duration_s, s.dt, config.model);
  s.times.resize(s.reference.size());
  for (std::size_t k = 0; k < s.times.size(); ++k) s.times[k] = k * s.dt;

  const double speed = speed_kmh / 3.6;
  s.initial_state = make_state(config.model.vehicle);
  if (kind == "curve") {
    // Start on the trajectory, rolling along the initial tangent.
    s.initial_state.pose = s.reference.front();
    const double h0 = s.initial_state.pose(2);
    s.initial_state.velocity = Vec3(speed * std::cos(h0), speed * std::sin(h0), 0.0);
  } else {
    // Line case: on the line but heading (and moving) 60 degrees off it.
    const double h0 = M_PI / 3.0;
    s.initial_state.pose = Vec3(0.0, 0.0, h0);
    s.initial_state.velocity = Vec3(speed * std::cos(h0), speed * std::sin(h0), 0.0);
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvariantError("cannot open scenario file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InvariantError("scenario parse error: " + std::string(e.what()));
  }
  Scenario s;
  s.name = j.value("name", path.stem().string());
  s.dt = j.value("dt", 0.01);
  if (j.contains("mass_override")) s.mass_override = j.at("mass_override").get<double>();
  if (!j.contains("reference") || !j.at("reference").is_array())
    throw InvariantError("scenario key reference: must be an array of [x, y, heading]");
  for (const json& row : j.at("reference")) {
    if (!row.is_array() || row.size() != 3)
      throw InvariantError("scenario key reference: must be an array of [x, y, heading]");
    s.reference.emplace_back(row[0].get<double>(), row[1].get<double>(),
                             row[2].get<double>());
  }
  s.times.resize(s.reference.size());
  for (std::size_t k = 0; k < s.times.size(); ++k) s.times[k] = k * s.dt;

  const json init = j.value("initial", json::object());
  const auto vec3 = [&](const char* key, const Vec3& fallback) {
    if (!init.contains(key)) return fallback;
    const json& v = init.at(key);
    if (!v.is_array() || v.size() != 3)
      throw InvariantError(std::string("scenario key initial.") + key +
                           ": must be [x, y, heading]");
    return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  };
  s.initial_state.pose = vec3("pose", Vec3::Zero());
  s.initial_state.velocity = vec3("velocity", Vec3::Zero());
  if (init.contains("steer_angles")) {
    const json& rows = init.at("steer_angles");
    s.initial_state.steer_angles = WheelMatrix::Zero(rows.size(), 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      s.initial_state.steer_angles(i, 0) = rows[i][0].get<double>();
      s.initial_state.steer_angles(i, 1) = rows[i][1].get<double>();
    }
  } else {
    s.initial_state.steer_angles = WheelMatrix::Zero(1, 2);
  }
  s.validate();
  return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  json j;
  j["name"] = scenario.name;
  j["dt"] = scenario.dt;
  if (scenario.mass_override) j["mass_override"] = *scenario.mass_override;
  json ref = json::array();
  for (const Vec3& p : scenario.reference) ref.push_back({p(0), p(1), p(2)});
  j["reference"] = std::move(ref);
  json init;
  init["pose"] = {scenario.initial_state.pose(0), scenario.initial_state.pose(1),
                  scenario.initial_state.pose(2)};
  init["velocity"] = {scenario.initial_state.velocity(0),
                      scenario.initial_state.velocity(1),
                      scenario.initial_state.velocity(2)};
  json steer = json::array();
  for (int i = 0; i < scenario.initial_state.steer_angles.rows(); ++i)
    steer.push_back({scenario.initial_state.steer_angles(i, 0),
                     scenario.initial_state.steer_angles(i, 1)});
  init["steer_angles"] = std::move(steer);
  j["initial"] = std::move(init);
  std::ofstream out(path);
  if (!out) throw InvariantError("cannot write scenario file: " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<std::string> controller_names() { return {"kinematic", "ntwo", "two"}; }

std::unique_ptr<Controller> make_controller(const std::string& name,
                                            const Config& config) {
  if (name == "kinematic")
    return std::make_unique<KinematicController>(config.kinematic, config.model,
                                                 config.plant.dt);
  if (name == "ntwo") {
    MpcSettings mpc = config.mpc;
    mpc.weights_l = Vec3::Zero();  // wear-blind variant
    return std::make_unique<MpcController>(mpc, config.sa, config.model);
  }
  if (name == "two")
    return std::make_unique<MpcController>(config.mpc, config.sa, config.model);
  throw InvariantError("unknown controller: " + name +
                       " (have kinematic, ntwo, two)");
}

RunResult run_closed_loop(const Scenario& scenario, const std::string& controller,
                          const Config& config) {
  scenario.validate();
  Config local = config;
  if (scenario.mass_override) local.set_mass(*scenario.mass_override);
  // Plant and control loop run on the scenario grid; the planner may look
  // ahead on a coarser clock, snapped to a whole number of grid steps so its
  // reference samples land on scenario poses.
  local.plant.dt = scenario.dt;
  local.mpc.dt =
      std::max(1L, std::lround(local.mpc.dt / scenario.dt)) * scenario.dt;
  local.validate();

  std::unique_ptr<Controller> ctrl = make_controller(controller, local);
  const int stride = static_cast<int>(
      std::max(1L, std::lround(ctrl->reference_spacing() / scenario.dt)));

  RunResult rr;
  rr.scenario = scenario.name;
  rr.controller = controller;
  rr.dt = scenario.dt;

  const int steps = scenario.steps();
  rr.log.reserve(steps);
  const int hor = std::max(1, ctrl->horizon());
  std::vector<Vec3> window(hor);
  const std::size_t last = scenario.reference.empty() ? 0 : scenario.reference.size() - 1;

  VehicleState state = scenario.initial_state;
  ControlVector applied;
  bool have_applied = false;

  for (int k = 0; k < steps; ++k) {
    for (int h = 0; h < hor; ++h)
      window[h] = scenario.reference[std::min(
          static_cast<std::size_t>(k) + static_cast<std::size_t>(h + 1) * stride, last)];

    StepResult sr;
    try {
      sr = ctrl->step(state, window);
    } catch (const std::exception& e) {
      throw std::runtime_error("controller '" + controller + "' failed at step " +
                               std::to_string(k) + ": " + e.what());
    }

    PlantStepFlags flags;
    auto [next, wear] = plant_step(state, sr.control, local.plant, local.model, &flags,
                                   have_applied ? &applied : nullptr, &applied);
    have_applied = true;

    StepLog row;
    row.t = scenario.times[k];
    row.state = state;
    row.reference = scenario.reference[k];
    row.control = sr.control;
    row.wear = wear;
    row.cost = sr.cost;
    row.tracking_term = sr.tracking_term;
    row.wear_term = sr.wear_term;
    row.initial_cost = sr.initial_cost;
    row.sa_iters = sr.iterations;
    row.clamped = flags.control_clamped || flags.steer_saturated;
    rr.log.push_back(std::move(row));

    state = next;
  }

  rr.wear = wear_work(rr.log, scenario.dt);
  rr.errors = tracking_errors(rr.log);
  rr.omega = performance_balance(rr.wear.total, rr.errors.mean);
  return rr;
}

WearLedger wear_work(std::span<const StepLog> log, double dt) {
  WearLedger w;
  for (const StepLog& row : log) {
    w.slip_ratio += row.wear.p_slip_ratio * dt;
    w.slip_angle += row.wear.p_slip_angle * dt;
    w.steer += row.wear.p_steer * dt;
  }
  w.total = w.slip_ratio + w.slip_angle + w.steer;
  return w;
}

TrackingErrors tracking_errors(std::span<const StepLog> log) {
  TrackingErrors e;
  if (log.empty()) return e;
  double sx = 0.0, sy = 0.0, sh = 0.0;
  for (const StepLog& row : log) {
    const Vec3 d = row.state.pose - row.reference;
    sx += d(0) * d(0);
    sy += d(1) * d(1);
    sh += d(2) * d(2);
  }
  const double n = static_cast<double>(log.size());
  e.x_cm = std::sqrt(sx / n) * 100.0;
  e.y_cm = std::sqrt(sy / n) * 100.0;
  e.heading_deg = std::sqrt(sh / n) * 180.0 / M_PI;
  e.mean = (e.x_cm + e.y_cm + e.heading_deg) / 3.0;
  return e;
}

double performance_balance(double wear_total, double e_bar) {
  if (!(wear_total >= 0.0)) throw InvariantError("performance_balance: W_tw must be >= 0");
  if (!(e_bar >= 0.0)) throw InvariantError("performance_balance: e_bar must be >= 0");
  const double exponent = e_bar < 50.0 ? 0.1 : 0.5;
  return std::sqrt(wear_total) * std::pow(e_bar, exponent);
}

namespace {

const char* bool_cell(bool b) { return b ? "1" : "0"; }

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

void write_csv(const RunResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvariantError("cannot write csv file: " + path.string());
  out << std::setprecision(12);

  const int n = result.log.empty() ? 0 : result.log.front().state.axle_count();
  out << "t,x,y,phi,x_ref,y_ref,phi_ref";
  const char* side[2] = {"l", "r"};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) out << ",delta_" << i + 1 << side[j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) out << ",omega_w_" << i + 1 << side[j];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 2; ++j) out << ",omega_s_" << i + 1 << side[j];
  out << ",P_s,P_alpha,P_t,J,sa_iters,clamped\n";

  for (const StepLog& row : result.log) {
    out << row.t << ',' << row.state.pose(0) << ',' << row.state.pose(1) << ','
        << row.state.pose(2) << ',' << row.reference(0) << ',' << row.reference(1)
        << ',' << row.reference(2);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) out << ',' << row.state.steer_angles(i, j);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) out << ',' << row.control.drive_rates(i, j);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) out << ',' << row.control.steer_rates(i, j);
    out << ',' << row.wear.p_slip_ratio << ',' << row.wear.p_slip_angle << ','
        << row.wear.p_steer << ',' << row.cost << ',' << row.sa_iters << ','
        << bool_cell(row.clamped) << "\n";
  }
}

RunResult read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvariantError("cannot open csv file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvariantError("csv file has no header: " + path.string());
  const std::vector<std::string> header = split_line(line);

  int delta_cols = 0;
  for (const std::string& h : header)
    if (h.rfind("delta_", 0) == 0) ++delta_cols;
  if (delta_cols % 2 != 0) throw InvariantError("csv header has unpaired wheel columns");
  const int n = delta_cols / 2;
  const std::size_t expected = 7 + 6 * static_cast<std::size_t>(n) + 6;

  RunResult rr;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != expected)
      throw InvariantError("csv row has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(expected));
    std::size_t c = 0;
    const auto num = [&]() { return std::stod(cells[c++]); };
    StepLog row;
    row.t = num();
    row.state = VehicleState{};
    row.state.steer_angles = WheelMatrix::Zero(n, 2);
    row.control = make_control(n);
    for (int a = 0; a < 3; ++a) row.state.pose(a) = num();
    for (int a = 0; a < 3; ++a) row.reference(a) = num();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) row.state.steer_angles(i, j) = num();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) row.control.drive_rates(i, j) = num();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 2; ++j) row.control.steer_rates(i, j) = num();
    row.wear.p_slip_ratio = num();
    row.wear.p_slip_angle = num();
    row.wear.p_steer = num();
    row.cost = num();
    row.sa_iters = static_cast<long>(num());
    row.clamped = num() != 0.0;
    rr.log.push_back(std::move(row));
  }

  rr.dt = rr.log.size() >= 2 ? rr.log[1].t - rr.log[0].t : 0.0;
  rr.wear = wear_work(rr.log, rr.dt);
  rr.errors = tracking_errors(rr.log);
  rr.omega = performance_balance(rr.wear.total, rr.errors.mean);
  return rr;
}

void write_metrics(const RunResult& result, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvariantError("cannot write metrics file: " + path.string());
  out << std::setprecision(12);
  out << "scenario=" << result.scenario << "\n";
  out << "controller=" << result.controller << "\n";
  out << "steps=" << result.log.size() << "\n";
  out << "dt=" << result.dt << "\n";
  out << "W_s=" << result.wear.slip_ratio << "\n";
  out << "W_alpha=" << result.wear.slip_angle << "\n";
  out << "W_t=" << result.wear.steer << "\n";
  out << "W_tw=" << result.wear.total << "\n";
  out << "e_x_cm=" << result.errors.x_cm << "\n";
  out << "e_y_cm=" << result.errors.y_cm << "\n";
  out << "e_phi_deg=" << result.errors.heading_deg << "\n";
  out << "e_bar=" << result.errors.mean << "\n";
  out << "omega=" << result.omega << "\n";
}

namespace {

bool report(std::ostream& out, const char* name, bool ok) {
  out << (ok ? "ok  " : "FAIL") << "  " << name << "\n";
  return ok;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

bool run_validation_suite(std::ostream& out) {
  bool all = true;
  std::mt19937_64 rng(20240817);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  {  // rotation composition
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
      const double a = 10.0 * uni(rng), b = 10.0 * uni(rng);
      ok = ok && ((rotation2d(a) * rotation2d(b) - rotation2d(a + b)).norm() < 1e-12);
    }
    all = report(out, "rotation composition", ok) && all;
  }

  {  // magic formula: odd, bounded by D
    PacejkaCoeffs c{10.0, 1.9, 8000.0, 0.97};
    bool ok = true;
    for (int k = 0; k < 200; ++k) {
      const double xi = 2.0 * uni(rng);
      const double f = magic_formula(xi, c);
      ok = ok && std::abs(f) <= c.peak_d + 1e-9;
      ok = ok && close(f, -magic_formula(-xi, c), 1e-9);
    }
    all = report(out, "tire force curve odd and bounded", ok) && all;
  }

  {  // wheel frame consistency
    TireParams tire;
    tire.vertical_load = 29430.0;
    tire.longitudinal.peak_d = 0.8 * tire.vertical_load;
    tire.lateral.peak_d = 0.75 * tire.vertical_load;
    bool ok = true;
    for (int k = 0; k < 100; ++k) {
      const Vec3 v(5.0 * uni(rng), 5.0 * uni(rng), uni(rng));
      const double delta = 0.3 * uni(rng);
      const WheelKinematics kin = wheel_kinematics(v, Vec2(3.0, 1.0), delta, 10.0, tire);
      ok = ok && ((kin.v_wheel - rotation2d(-delta) * kin.v_body).norm() < 1e-12);
    }
    all = report(out, "wheel frame rotation consistency", ok) && all;
  }

  {  // cost function vs dense block-diagonal quadratic
    MpcSettings settings;
    settings.prediction_horizon = 5;
    settings.control_horizon = 2;
    settings.weights_q = Vec3(1.3, 0.7, 4.0);
    settings.weights_l = Vec3(2e-6, 3e-6, 5e-7);
    std::vector<VehicleState> pred(5);
    std::vector<WearPower> wear(5);
    std::vector<Vec3> ref(5);
    Eigen::VectorXd y(15), yt(15), p(15);
    for (int k = 0; k < 5; ++k) {
      pred[k].pose = Vec3(uni(rng), uni(rng), uni(rng));
      ref[k] = Vec3(uni(rng), uni(rng), uni(rng));
      wear[k].p_slip_ratio = 50.0 * (uni(rng) + 1.0);
      wear[k].p_slip_angle = 50.0 * (uni(rng) + 1.0);
      wear[k].p_steer = 50.0 * (uni(rng) + 1.0);
      y.segment<3>(3 * k) = pred[k].pose;
      yt.segment<3>(3 * k) = ref[k];
      p.segment<3>(3 * k) =
          Vec3(wear[k].p_slip_ratio, wear[k].p_slip_angle, wear[k].p_steer);
    }
    Eigen::MatrixXd wy = Eigen::MatrixXd::Zero(15, 15), wp = Eigen::MatrixXd::Zero(15, 15);
    for (int k = 0; k < 5; ++k) {
      wy.block<3, 3>(3 * k, 3 * k) = settings.weights_q.asDiagonal();
      wp.block<3, 3>(3 * k, 3 * k) = settings.weights_l.asDiagonal();
    }
    const double dense = (y - yt).dot(wy * (y - yt)) + p.dot(wp * p);
    const double j = cost_function(pred, wear, ref, settings);
    all = report(out, "cost matches dense stacked quadratic",
                 close(j, dense, 1e-10 * std::max(1.0, std::abs(dense)))) &&
          all;
  }

  {  // wear work identity and second-pass recompute
    std::vector<StepLog> log(40);
    for (StepLog& row : log) {
      row.wear.p_slip_ratio = 100.0 * (uni(rng) + 1.5);
      row.wear.p_slip_angle = 100.0 * (uni(rng) + 1.5);
      row.wear.p_steer = 100.0 * (uni(rng) + 1.5);
    }
    const WearLedger w = wear_work(log, 0.01);
    double s = 0.0;
    for (auto it = log.rbegin(); it != log.rend(); ++it)
      s += (it->wear.p_slip_ratio + it->wear.p_slip_angle + it->wear.p_steer) * 0.01;
    bool ok = w.total == w.slip_ratio + w.slip_angle + w.steer;
    ok = ok && close(s, w.total, 1e-9 * std::max(1.0, std::abs(s)));
    all = report(out, "wear work identity", ok) && all;
  }

  {  // performance balance spot values
    bool ok = close(performance_balance(7.37e8, 18.44), 3.63e4, 0.01 * 3.63e4);
    ok = ok && close(performance_balance(1.66e9, 29.23), 5.71e4, 0.01 * 5.71e4);
    ok = ok && performance_balance(0.0, 12.0) == 0.0;
    all = report(out, "balance index spot values", ok) && all;
  }

  Config cfg = default_config();

  {  // plant determinism + straight rolling
    VehicleState state = make_state(cfg.model.vehicle);
    state.velocity = Vec3(5.0, 0.0, 0.0);
    ControlVector u = make_control(cfg.model.vehicle.axle_count);
    u.drive_rates.setConstant(5.0 / cfg.model.tire.wheel_radius);
    VehicleState a = state, b = state;
    for (int k = 0; k < 100; ++k) {
      a = plant_step(a, u, cfg.plant, cfg.model).first;
      b = plant_step(b, u, cfg.plant, cfg.model).first;
    }
    bool ok = a.pose == b.pose && a.velocity == b.velocity;
    ok = ok && std::abs(a.pose(0) - 5.0) < 0.001 * 5.0;
    ok = ok && std::abs(a.pose(1)) < 1e-6 && std::abs(a.pose(2)) < 1e-6;
    all = report(out, "plant deterministic, straight rolling exact", ok) && all;
  }

  {  // rollout against an inline Euler loop
    MpcSettings settings = cfg.mpc;
    settings.prediction_horizon = 6;
    settings.control_horizon = 3;
    VehicleState state = make_state(cfg.model.vehicle);
    state.velocity = Vec3(8.0, 0.3, 0.05);
    std::vector<ControlVector> controls(3, make_control(2));
    for (ControlVector& u : controls) {
      u.drive_rates.setConstant(16.0 + 2.0 * uni(rng));
      u.steer_rates.setConstant(0.4 * uni(rng));
    }
    const RolloutResult ro = rollout(state, controls, settings, cfg.model);
    VehicleState s = state;
    bool ok = true;
    for (int k = 0; k < 6; ++k) {
      const ControlVector& u = controls[std::min(k, 2)];
      const Acceleration acc = body_acceleration(s, u.drive_rates, cfg.model);
      s.pose += settings.dt * s.velocity;
      s.velocity += settings.dt * acc.accel_global;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          s.steer_angles(i, j) =
              std::clamp(s.steer_angles(i, j) + settings.dt * u.steer_rates(i, j),
                         cfg.model.limits.steer_angle_min,
                         cfg.model.limits.steer_angle_max);
      ok = ok && (ro.states[k].pose - s.pose).norm() < 1e-12;
    }
    all = report(out, "prediction rollout matches hand loop", ok) && all;
  }

  {  // annealer determinism and quality on a smooth bowl
    const auto bowl = [](const Eigen::VectorXd& x) {
      return (x(0) - 0.3) * (x(0) - 0.3) + (x(1) + 0.2) * (x(1) + 0.2);
    };
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(2);
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, -1.0);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(2, 1.0);
    SaSettings sa;
    sa.rng_seed = 7;
    const SaResult r1 = anneal(x0, lo, hi, bowl, sa);
    const SaResult r2 = anneal(x0, lo, hi, bowl, sa);
    bool ok = r1.best == r2.best && r1.best_cost == r2.best_cost;
    ok = ok && r1.best_cost < 1e-2;
    all = report(out, "annealer deterministic and finds the bowl", ok) && all;
  }

  {  // inverse kinematics puts every wheel tangent to the turn circle
    bool ok = true;
    Limits wide;
    wide.steer_angle_min = -M_PI;
    wide.steer_angle_max = M_PI;
    for (int k = 0; k < 50; ++k) {
      BodyTwist twist{3.0 * uni(rng), 3.0 * uni(rng), 0.0};
      twist.omega = uni(rng);
      if (std::abs(twist.omega) < 0.1) twist.omega = 0.5;
      const WheelCommand cmd =
          inverse_kinematics(twist, cfg.model.vehicle, cfg.model.tire, wide);
      const Vec2 icr(-twist.vy / twist.omega, twist.vx / twist.omega);
      for (int i = 0; i < cfg.model.vehicle.axle_count; ++i) {
        for (int j = 0; j < 2; ++j) {
          const Vec2 pos = cfg.model.vehicle.wheel_position(i, j);
          const Vec2 dir(std::cos(cmd.steer_angles(i, j)),
                         std::sin(cmd.steer_angles(i, j)));
          ok = ok && std::abs(dir.dot(pos - icr)) < 1e-9;
        }
      }
    }
    all = report(out, "steering centers intersect at one point", ok) && all;
  }

  {  // config round-trip
    const std::string once = serialize_config(cfg);
    const std::string twice = serialize_config(parse_config(once));
    all = report(out, "config round-trip", once == twice) && all;
  }

  out << (all ? "validation suite passed" : "validation suite FAILED") << "\n";
  return all;
}

}  // namespace swerve
