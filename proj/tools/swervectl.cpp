#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swerve/harness.hpp"

namespace sw = swerve;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string scenario = "curve";
  double speed_kmh = 35.0;
  double duration_s = 12.0;
  long long seed = -1;  // -1 keeps the config seed
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file (defaults built in)");
  cmd->add_option("--scenario", o.scenario, "curve, offset_line, or a scenario JSON file");
  cmd->add_option("--speed", o.speed_kmh, "reference speed, km/h");
  cmd->add_option("--duration", o.duration_s, "run length, s");
  cmd->add_option("--seed", o.seed, "solver RNG seed override");
  cmd->add_option("--out", o.out_dir, "directory for CSV/metrics output");
}

sw::Config resolve_config(const CommonOpts& o) {
  sw::Config cfg = o.config_path.empty() ? sw::default_config()
                                         : sw::load_config(o.config_path);
  if (o.seed >= 0) cfg.sa.rng_seed = static_cast<std::uint64_t>(o.seed);
  return cfg;
}

sw::Scenario resolve_scenario(const CommonOpts& o, const sw::Config& cfg) {
  if (o.scenario == "curve" || o.scenario == "offset_line")
    return sw::make_scenario(o.scenario, o.speed_kmh, o.duration_s, cfg);
  if (std::filesystem::exists(o.scenario)) return sw::load_scenario(o.scenario);
  throw sw::InvariantError("unknown scenario: " + o.scenario +
                           " (have curve, offset_line, or a scenario file)");
}

void write_outputs(const sw::RunResult& rr, const std::string& out_dir) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path base =
      std::filesystem::path(out_dir) / (rr.scenario + "_" + rr.controller);
  sw::write_csv(rr, base.string() + ".csv");
  sw::write_metrics(rr, base.string() + ".metrics");
}

void print_metrics_header(std::ostream& out) {
  out << std::left << std::setw(11) << "controller" << std::right << std::setw(12)
      << "omega" << std::setw(13) << "W_tw" << std::setw(13) << "W_alpha"
      << std::setw(13) << "W_s" << std::setw(13) << "W_t" << std::setw(10) << "e_bar"
      << std::setw(10) << "e_x" << std::setw(10) << "e_y" << std::setw(10) << "e_phi"
      << "\n";
}

void print_metrics_row(std::ostream& out, const sw::RunResult& rr) {
  out << std::setprecision(4) << std::left << std::setw(11) << rr.controller
      << std::right << std::setw(12) << rr.omega << std::setw(13) << rr.wear.total
      << std::setw(13) << rr.wear.slip_angle << std::setw(13) << rr.wear.slip_ratio
      << std::setw(13) << rr.wear.steer << std::setw(10) << rr.errors.mean
      << std::setw(10) << rr.errors.x_cm << std::setw(10) << rr.errors.y_cm
      << std::setw(10) << rr.errors.heading_deg << "\n";
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(csv);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swerve-drive tracking simulator"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  std::string run_controller = "two";
  CLI::App* run = app.add_subcommand("run", "simulate one controller on one scenario");
  add_common(run, run_opts);
  run->add_option("--controller", run_controller, "kinematic, ntwo, or two");

  CommonOpts cmp_opts;
  std::string cmp_controllers = "kinematic,ntwo,two";
  CLI::App* cmp = app.add_subcommand("compare", "run several controllers on one scenario");
  add_common(cmp, cmp_opts);
  cmp->add_option("--controllers", cmp_controllers, "comma-separated controller list");

  CommonOpts sweep_opts;
  sweep_opts.speed_kmh = 30.0;
  sweep_opts.duration_s = 6.0;
  std::string sweep_controllers = "kinematic,ntwo,two";
  std::string sweep_masses = "8000,12000,16000,20000";
  CLI::App* sweep = app.add_subcommand("sweep", "mass sweep on the scenario");
  add_common(sweep, sweep_opts);
  sweep->add_option("--controllers", sweep_controllers, "comma-separated controller list");
  sweep->add_option("--masses", sweep_masses, "comma-separated masses, kg");

  CLI::App* validate = app.add_subcommand("validate", "run the built-in self checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const sw::Config cfg = resolve_config(run_opts);
      const sw::Scenario scenario = resolve_scenario(run_opts, cfg);
      const sw::RunResult rr = sw::run_closed_loop(scenario, run_controller, cfg);
      write_outputs(rr, run_opts.out_dir);
      print_metrics_header(std::cout);
      print_metrics_row(std::cout, rr);
    } else if (cmp->parsed()) {
      const sw::Config cfg = resolve_config(cmp_opts);
      const sw::Scenario scenario = resolve_scenario(cmp_opts, cfg);
      print_metrics_header(std::cout);
      for (const std::string& name : split_list(cmp_controllers)) {
        const sw::RunResult rr = sw::run_closed_loop(scenario, name, cfg);
        write_outputs(rr, cmp_opts.out_dir);
        print_metrics_row(std::cout, rr);
      }
    } else if (sweep->parsed()) {
      const sw::Config cfg = resolve_config(sweep_opts);
      sw::Scenario scenario = resolve_scenario(sweep_opts, cfg);
      std::cout << std::left << std::setw(9) << "mass_kg" << " ";
      print_metrics_header(std::cout);
      for (const std::string& mass : split_list(sweep_masses)) {
        scenario.mass_override = std::stod(mass);
        for (const std::string& name : split_list(sweep_controllers)) {
          sw::RunResult rr = sw::run_closed_loop(scenario, name, cfg);
          rr.scenario += "_" + mass;
          write_outputs(rr, sweep_opts.out_dir);
          std::cout << std::left << std::setw(9) << mass << " ";
          print_metrics_row(std::cout, rr);
        }
      }
    } else if (validate->parsed()) {
      return sw::run_validation_suite(std::cout) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
