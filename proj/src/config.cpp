#include "swerve/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace swerve {

using nlohmann::json;

void Config::set_mass(double mass_kg) {
  if (!(std::isfinite(mass_kg) && mass_kg > 0.0))
    throw ConfigError("vehicle.mass_kg must be > 0");
  model.vehicle.mass = mass_kg;
  if (!explicit_vertical_load)
    model.tire.vertical_load =
        mass_kg * kGravity / (2.0 * model.vehicle.axle_count);
  if (!explicit_peak_long)
    model.tire.longitudinal.peak_d = 0.8 * model.tire.vertical_load;
  if (!explicit_peak_lat)
    model.tire.lateral.peak_d = 0.75 * model.tire.vertical_load;
}

void Config::validate() const {
  try {
    model.validate();
    mpc.validate();
    sa.validate();
    plant.validate();
  } catch (const InvariantError& e) {
    throw ConfigError(e.what());
  }
  if (!(kinematic.position > 0.0) || !(kinematic.heading > 0.0))
    throw ConfigError("kinematic gains must be > 0");
}

Config default_config() {
  Config c;
  c.set_mass(c.model.vehicle.mass);
  return c;
}

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config key " + key + ": " + what);
}

void check_known(const json& obj, const std::string& section,
                 std::initializer_list<const char*> known) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(section.empty() ? key : section + "." + key, "unknown key");
  }
}

double number(const json& sec, const std::string& section, const char* key,
              double fallback) {
  if (!sec.contains(key)) return fallback;
  const json& v = sec.at(key);
  if (!v.is_number()) fail(section + "." + key, "must be a number");
  return v.get<double>();
}

long long integer(const json& sec, const std::string& section, const char* key,
                  long long fallback) {
  if (!sec.contains(key)) return fallback;
  const json& v = sec.at(key);
  if (!v.is_number_integer()) fail(section + "." + key, "must be an integer");
  return v.get<long long>();
}

std::vector<double> number_list(const json& sec, const std::string& section,
                                const char* key, const std::vector<double>& fallback) {
  if (!sec.contains(key)) return fallback;
  const json& v = sec.at(key);
  if (!v.is_array()) fail(section + "." + key, "must be an array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) fail(section + "." + key, "must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// Scalar applies to both tire channels, a pair splits [longitudinal, lateral].
void coeff_pair(const json& sec, const char* key, double& lon, double& lat,
                bool* given = nullptr) {
  if (!sec.contains(key)) return;
  if (given) *given = true;
  const json& v = sec.at(key);
  if (v.is_number()) {
    lon = lat = v.get<double>();
    return;
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    lon = v[0].get<double>();
    lat = v[1].get<double>();
    return;
  }
  fail(std::string("tire.") + key, "must be a number or a [longitudinal, lateral] pair");
}

// Scalar r means the symmetric range [-r, r] (or [0, r] when min is pinned),
// a pair gives [min, max] directly.
void range_pair(const json& sec, const char* key, double& lo, double& hi,
                bool pin_min_zero) {
  if (!sec.contains(key)) return;
  const json& v = sec.at(key);
  if (v.is_number()) {
    hi = v.get<double>();
    lo = pin_min_zero ? 0.0 : -hi;
    return;
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    lo = v[0].get<double>();
    hi = v[1].get<double>();
    return;
  }
  fail(std::string("limits.") + key, "must be a number or a [min, max] pair");
}

json section(const json& root, const char* name) {
  if (!root.contains(name)) return json::object();
  const json& v = root.at(name);
  if (!v.is_object()) fail(name, "must be an object");
  return v;
}

}  // namespace

Config parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  check_known(root, "",
              {"vehicle", "tire", "limits", "mpc", "sa", "sim", "kinematic"});

  Config c;

  const json vehicle = section(root, "vehicle");
  check_known(vehicle, "vehicle",
              {"mass_kg", "yaw_inertia", "axle_count", "wheel_x", "wheel_y"});
  c.model.vehicle.mass = number(vehicle, "vehicle", "mass_kg", c.model.vehicle.mass);
  c.model.vehicle.yaw_inertia =
      number(vehicle, "vehicle", "yaw_inertia", c.model.vehicle.yaw_inertia);
  c.model.vehicle.wheel_x =
      number_list(vehicle, "vehicle", "wheel_x", c.model.vehicle.wheel_x);
  const std::vector<double> wy =
      number_list(vehicle, "vehicle", "wheel_y",
                  {c.model.vehicle.wheel_y[0], c.model.vehicle.wheel_y[1]});
  if (wy.size() != 2) fail("vehicle.wheel_y", "must have exactly 2 entries");
  c.model.vehicle.wheel_y = {wy[0], wy[1]};
  c.model.vehicle.axle_count = static_cast<int>(
      integer(vehicle, "vehicle", "axle_count",
              static_cast<long long>(c.model.vehicle.wheel_x.size())));

  const json tire = section(root, "tire");
  check_known(tire, "tire",
              {"B", "C", "D", "E", "radius", "k_t", "vertical_load"});
  coeff_pair(tire, "B", c.model.tire.longitudinal.stiffness_b,
             c.model.tire.lateral.stiffness_b);
  coeff_pair(tire, "C", c.model.tire.longitudinal.shape_c,
             c.model.tire.lateral.shape_c);
  coeff_pair(tire, "E", c.model.tire.longitudinal.curvature_e,
             c.model.tire.lateral.curvature_e);
  bool d_given = false;
  coeff_pair(tire, "D", c.model.tire.longitudinal.peak_d, c.model.tire.lateral.peak_d,
             &d_given);
  c.explicit_peak_long = c.explicit_peak_lat = d_given;
  c.model.tire.wheel_radius = number(tire, "tire", "radius", c.model.tire.wheel_radius);
  c.model.tire.steer_loss_coeff =
      number(tire, "tire", "k_t", c.model.tire.steer_loss_coeff);
  if (tire.contains("vertical_load")) {
    c.explicit_vertical_load = true;
    c.model.tire.vertical_load = number(tire, "tire", "vertical_load", 0.0);
  }

  const json limits = section(root, "limits");
  check_known(limits, "limits", {"steer_rate", "drive_rate", "steer_angle"});
  range_pair(limits, "steer_rate", c.model.limits.steer_rate_min,
             c.model.limits.steer_rate_max, false);
  range_pair(limits, "drive_rate", c.model.limits.drive_min, c.model.limits.drive_max,
             true);
  range_pair(limits, "steer_angle", c.model.limits.steer_angle_min,
             c.model.limits.steer_angle_max, false);

  const json sim = section(root, "sim");
  check_known(sim, "sim", {"dt", "substeps", "actuator_lag"});
  c.plant.dt = number(sim, "sim", "dt", c.plant.dt);
  c.plant.substeps = static_cast<int>(integer(sim, "sim", "substeps", c.plant.substeps));
  c.plant.actuator_lag = number(sim, "sim", "actuator_lag", c.plant.actuator_lag);

  const json mpc = section(root, "mpc");
  check_known(mpc, "mpc",
              {"prediction_horizon", "control_horizon", "weights_q", "weights_l", "dt"});
  c.mpc.prediction_horizon = static_cast<int>(
      integer(mpc, "mpc", "prediction_horizon", c.mpc.prediction_horizon));
  c.mpc.control_horizon =
      static_cast<int>(integer(mpc, "mpc", "control_horizon", c.mpc.control_horizon));
  const std::vector<double> q = number_list(
      mpc, "mpc", "weights_q",
      {c.mpc.weights_q(0), c.mpc.weights_q(1), c.mpc.weights_q(2)});
  const std::vector<double> l = number_list(
      mpc, "mpc", "weights_l",
      {c.mpc.weights_l(0), c.mpc.weights_l(1), c.mpc.weights_l(2)});
  if (q.size() != 3) fail("mpc.weights_q", "must have 3 entries");
  if (l.size() != 3) fail("mpc.weights_l", "must have 3 entries");
  c.mpc.weights_q = Vec3(q[0], q[1], q[2]);
  c.mpc.weights_l = Vec3(l[0], l[1], l[2]);
  c.mpc.dt = number(mpc, "mpc", "dt", c.mpc.dt);

  const json sa = section(root, "sa");
  check_known(sa, "sa",
              {"initial_temp", "cooling_rate", "iterations", "moves_per_temp",
               "perturb_scale", "rng_seed"});
  c.sa.initial_temp = number(sa, "sa", "initial_temp", c.sa.initial_temp);
  c.sa.cooling_rate = number(sa, "sa", "cooling_rate", c.sa.cooling_rate);
  c.sa.iterations = static_cast<int>(integer(sa, "sa", "iterations", c.sa.iterations));
  c.sa.moves_per_temp =
      static_cast<int>(integer(sa, "sa", "moves_per_temp", c.sa.moves_per_temp));
  c.sa.perturb_scale = number(sa, "sa", "perturb_scale", c.sa.perturb_scale);
  c.sa.rng_seed = static_cast<std::uint64_t>(
      integer(sa, "sa", "rng_seed", static_cast<long long>(c.sa.rng_seed)));

  const json kin = section(root, "kinematic");
  check_known(kin, "kinematic", {"k_p", "k_heading"});
  c.kinematic.position = number(kin, "kinematic", "k_p", c.kinematic.position);
  c.kinematic.heading = number(kin, "kinematic", "k_heading", c.kinematic.heading);

  c.set_mass(c.model.vehicle.mass);
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const Config& c) {
  json root;
  root["vehicle"] = {{"mass_kg", c.model.vehicle.mass},
                     {"yaw_inertia", c.model.vehicle.yaw_inertia},
                     {"axle_count", c.model.vehicle.axle_count},
                     {"wheel_x", c.model.vehicle.wheel_x},
                     {"wheel_y", c.model.vehicle.wheel_y}};
  json tire = {{"B", {c.model.tire.longitudinal.stiffness_b, c.model.tire.lateral.stiffness_b}},
               {"C", {c.model.tire.longitudinal.shape_c, c.model.tire.lateral.shape_c}},
               {"E", {c.model.tire.longitudinal.curvature_e, c.model.tire.lateral.curvature_e}},
               {"radius", c.model.tire.wheel_radius},
               {"k_t", c.model.tire.steer_loss_coeff}};
  // Derived values are omitted so reloading re-derives them from the mass.
  if (c.explicit_peak_long || c.explicit_peak_lat)
    tire["D"] = {c.model.tire.longitudinal.peak_d, c.model.tire.lateral.peak_d};
  if (c.explicit_vertical_load) tire["vertical_load"] = c.model.tire.vertical_load;
  root["tire"] = std::move(tire);
  root["limits"] = {
      {"steer_rate", {c.model.limits.steer_rate_min, c.model.limits.steer_rate_max}},
      {"drive_rate", {c.model.limits.drive_min, c.model.limits.drive_max}},
      {"steer_angle", {c.model.limits.steer_angle_min, c.model.limits.steer_angle_max}}};
  root["mpc"] = {{"prediction_horizon", c.mpc.prediction_horizon},
                 {"control_horizon", c.mpc.control_horizon},
                 {"weights_q", {c.mpc.weights_q(0), c.mpc.weights_q(1), c.mpc.weights_q(2)}},
                 {"weights_l", {c.mpc.weights_l(0), c.mpc.weights_l(1), c.mpc.weights_l(2)}},
                 {"dt", c.mpc.dt}};
  root["sa"] = {{"initial_temp", c.sa.initial_temp},
                {"cooling_rate", c.sa.cooling_rate},
                {"iterations", c.sa.iterations},
                {"moves_per_temp", c.sa.moves_per_temp},
                {"perturb_scale", c.sa.perturb_scale},
                {"rng_seed", c.sa.rng_seed}};
  root["sim"] = {{"dt", c.plant.dt},
                 {"substeps", c.plant.substeps},
                 {"actuator_lag", c.plant.actuator_lag}};
  root["kinematic"] = {{"k_p", c.kinematic.position},
                       {"k_heading", c.kinematic.heading}};
  return root.dump(2) + "\n";
}

void save_config(const Config& config, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path.string());
  out << serialize_config(config);
}

}  // namespace swerve
