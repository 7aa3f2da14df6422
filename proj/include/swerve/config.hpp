#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "swerve/baseline.hpp"
#include "swerve/dynamics.hpp"
#include "swerve/mpc.hpp"
#include "swerve/sa.hpp"
#include "swerve/types.hpp"

namespace swerve {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kGravity = 9.81;  // m/s^2

/// Full experiment configuration. Tire peak forces and the per-wheel vertical
/// load default to values derived from the vehicle mass (uniform load split,
/// peak_D = 0.8 F_N longitudinal / 0.75 F_N lateral); explicitly configured
/// values survive mass changes.
struct Config {
  VehicleModel model;
  MpcSettings mpc;
  SaSettings sa;
  PlantSettings plant;
  KinematicController::Gains kinematic;

  bool explicit_vertical_load = false;
  bool explicit_peak_long = false;
  bool explicit_peak_lat = false;

  /// Changes the vehicle mass and re-derives every non-explicit dependent
  /// value (vertical load, tire peaks).
  void set_mass(double mass_kg);

  void validate() const;
};

/// Built-in defaults (12 t, two axles) with derived tire loads filled in.
Config default_config();

/// Parses the JSON config document; absent keys fall back to defaults.
/// Throws ConfigError naming the offending key on type or invariant errors.
Config parse_config(const std::string& text);

Config load_config(const std::filesystem::path& path);

/// Serializes so that parse_config(serialize_config(c)) reproduces identical
/// parameters. Derived values are omitted, explicit ones kept.
std::string serialize_config(const Config& config);

void save_config(const Config& config, const std::filesystem::path& path);

}  // namespace swerve
