#include "doctest.h"

#include "swerve/config.hpp"
#include "swerve/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace swerve;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Config light_mpc_config() {
  // Trimmed solver budget keeps closed-loop harness tests quick.
  Config c = default_config();
  c.sa.iterations = 8;
  c.sa.moves_per_temp = 8;
  return c;
}

}  // namespace

TEST_CASE("reference generators produce uniform, correctly sized grids") {
  const Config cfg = default_config();

  // 10 s at 0.01 s: 1001 poses including both endpoints.
  const std::vector<Vec3> line =
      generate_reference("offset_line", 10.0, 10.0, 0.01, cfg.model);
  CHECK(line.size() == 1001);
  CHECK(line[0] == Vec3(0.0, 0.0, 0.0));
  const double v = 10.0 / 3.6;
  CHECK(line[1000].x() == doctest::Approx(v * 10.0).epsilon(1e-9));
  CHECK(line[500].y() == 0.0);
  CHECK(line[500].z() == 0.0);

  const std::vector<Vec3> curve =
      generate_reference("curve", 35.0, 10.0, 0.01, cfg.model);
  CHECK(curve.size() == 1001);
  CHECK(curve[0].x() == 0.0);
  CHECK(curve[0].y() == 0.0);

  CHECK_THROWS_AS((void)generate_reference("zigzag", 10.0, 1.0, 0.01, cfg.model),
                  InvariantError);
}

TEST_CASE("curve reference moves at constant ground speed") {
  const Config cfg = default_config();
  const double v = 35.0 / 3.6;
  const std::vector<Vec3> curve =
      generate_reference("curve", 35.0, 8.0, 0.01, cfg.model);

  for (size_t k = 1; k < curve.size(); k += 37) {
    const double ds = (curve[k].head<2>() - curve[k - 1].head<2>()).norm();
    CHECK(ds == doctest::Approx(v * 0.01).epsilon(1e-3));
  }

  // Headings follow the path tangent.
  for (size_t k = 1; k + 1 < curve.size(); k += 101) {
    const Vec2 d = curve[k + 1].head<2>() - curve[k - 1].head<2>();
    CHECK(curve[k].z() == doctest::Approx(std::atan2(d.y(), d.x())).epsilon(1e-4));
  }
}

TEST_CASE("curve amplitude tracks the steering budget") {
  Config cfg = default_config();
  const std::vector<Vec3> stock = generate_reference("curve", 35.0, 6.0, 0.01, cfg.model);

  // A tighter steering limit must flatten the path.
  Config narrow = cfg;
  narrow.model.limits.steer_angle_min = -0.1;
  narrow.model.limits.steer_angle_max = 0.1;
  const std::vector<Vec3> flat = generate_reference("curve", 35.0, 6.0, 0.01, narrow.model);

  double stock_peak = 0.0, flat_peak = 0.0;
  for (const Vec3& p : stock) stock_peak = std::max(stock_peak, std::abs(p.y()));
  for (const Vec3& p : flat) flat_peak = std::max(flat_peak, std::abs(p.y()));
  CHECK(flat_peak < stock_peak);
  CHECK(stock_peak > 1.0);
}

TEST_CASE("scenarios carry consistent initial states") {
  const Config cfg = default_config();

  const Scenario curve = make_scenario("curve", 35.0, 2.0, cfg);
  CHECK_NOTHROW(curve.validate());
  CHECK(curve.steps() == 200);
  CHECK(curve.duration() == doctest::Approx(2.0));
  // Starts on the trajectory, moving along it at the reference speed.
  CHECK(curve.initial_state.pose == curve.reference[0]);
  const double v = 35.0 / 3.6;
  CHECK(curve.initial_state.velocity.head<2>().norm() == doctest::Approx(v).epsilon(1e-9));

  const Scenario line = make_scenario("offset_line", 10.0, 2.0, cfg);
  // 60 degrees of initial heading offset, velocity along the vehicle heading.
  CHECK(line.initial_state.pose.z() == doctest::Approx(M_PI / 3.0));
  const double vl = 10.0 / 3.6;
  CHECK(line.initial_state.velocity.x() == doctest::Approx(vl * std::cos(M_PI / 3.0)));
  CHECK(line.initial_state.velocity.y() == doctest::Approx(vl * std::sin(M_PI / 3.0)));
  CHECK(line.reference[0].z() == 0.0);
}

TEST_CASE("scenario validation rejects broken grids") {
  Scenario s = make_scenario("offset_line", 10.0, 1.0, default_config());
  CHECK_NOTHROW(s.validate());
  s.times[5] += 1e-3;  // non-uniform grid
  CHECK_THROWS_AS(s.validate(), InvariantError);

  s = make_scenario("offset_line", 10.0, 1.0, default_config());
  s.times.pop_back();
  CHECK_THROWS_AS(s.validate(), InvariantError);
}

TEST_CASE("scenario files round-trip") {
  const Scenario s = make_scenario("curve", 20.0, 1.0, default_config());
  const fs::path p = temp_file("swerve_test_scenario.json");
  save_scenario(s, p);
  const Scenario back = load_scenario(p);
  fs::remove(p);

  CHECK(back.name == s.name);
  CHECK(back.dt == s.dt);
  REQUIRE(back.reference.size() == s.reference.size());
  for (size_t k = 0; k < s.reference.size(); ++k)
    CHECK((back.reference[k] - s.reference[k]).norm() < 1e-12);
  CHECK((back.initial_state.pose - s.initial_state.pose).norm() < 1e-12);
  CHECK((back.initial_state.velocity - s.initial_state.velocity).norm() < 1e-12);
}

TEST_CASE("wear work is power times time, summed per channel") {
  std::vector<StepLog> log(50);
  for (StepLog& row : log) row.wear = {100.0, 0.0, 40.0};
  const WearLedger w = wear_work(log, 0.01);
  CHECK(w.slip_ratio == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(w.slip_angle == 0.0);
  CHECK(w.steer == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(w.total == doctest::Approx(70.0).epsilon(1e-12));
  // The total is the exact sum of the channels, not a re-accumulation.
  CHECK(w.total == w.slip_ratio + w.slip_angle + w.steer);

  CHECK(wear_work({}, 0.01).total == 0.0);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1e4);
  std::vector<StepLog> noisy(200);
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (StepLog& row : noisy) {
    row.wear = {u(rng), u(rng), u(rng)};
    s1 += row.wear.p_slip_ratio * 0.02;
    s2 += row.wear.p_slip_angle * 0.02;
    s3 += row.wear.p_steer * 0.02;
  }
  const WearLedger nw = wear_work(noisy, 0.02);
  CHECK(nw.slip_ratio == doctest::Approx(s1).epsilon(1e-12));
  CHECK(nw.slip_angle == doctest::Approx(s2).epsilon(1e-12));
  CHECK(nw.steer == doctest::Approx(s3).epsilon(1e-12));
}

TEST_CASE("tracking errors are RMSE in centimetres and degrees") {
  std::vector<StepLog> log(40);
  for (StepLog& row : log) {
    row.state.pose = Vec3(1.1, 2.0, 0.5);
    row.reference = Vec3(1.0, 2.0, 0.5);  // constant 0.1 m error in x only
  }
  const TrackingErrors e = tracking_errors(log);
  CHECK(e.x_cm == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(e.y_cm == 0.0);
  CHECK(e.heading_deg == 0.0);
  CHECK(e.mean == doctest::Approx(10.0 / 3.0).epsilon(1e-12));

  // Randomized rows against a direct dense recomputation.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<StepLog> noisy(128);
  double sx = 0.0, sy = 0.0, sp = 0.0;
  for (StepLog& row : noisy) {
    row.state.pose = Vec3(u(rng), u(rng), u(rng));
    row.reference = Vec3(u(rng), u(rng), u(rng));
    const Vec3 d = row.state.pose - row.reference;
    sx += d.x() * d.x();
    sy += d.y() * d.y();
    sp += d.z() * d.z();
  }
  const TrackingErrors ne = tracking_errors(noisy);
  CHECK(ne.x_cm == doctest::Approx(100.0 * std::sqrt(sx / 128)).epsilon(1e-12));
  CHECK(ne.y_cm == doctest::Approx(100.0 * std::sqrt(sy / 128)).epsilon(1e-12));
  CHECK(ne.heading_deg ==
        doctest::Approx(180.0 / M_PI * std::sqrt(sp / 128)).epsilon(1e-12));
  CHECK(ne.mean == doctest::Approx((ne.x_cm + ne.y_cm + ne.heading_deg) / 3.0));

  CHECK(tracking_errors({}).mean == 0.0);
}

TEST_CASE("balance index switches exponent at 50") {
  CHECK(performance_balance(0.0, 10.0) == 0.0);
  CHECK(performance_balance(1e8, 0.0) == 0.0);

  CHECK(performance_balance(1e8, 10.0) ==
        doctest::Approx(std::sqrt(1e8) * std::pow(10.0, 0.1)).epsilon(1e-12));
  CHECK(performance_balance(1e8, 50.0) ==
        doctest::Approx(std::sqrt(1e8) * std::pow(50.0, 0.5)).epsilon(1e-12));

  // The exponent jump at 50 scales the index by 50^0.4.
  const double below = performance_balance(1e8, 50.0 - 1e-9);
  const double above = performance_balance(1e8, 50.0);
  CHECK(above / below == doctest::Approx(std::pow(50.0, 0.4)).epsilon(1e-6));

  CHECK_THROWS_AS((void)performance_balance(-1.0, 10.0), InvariantError);
  CHECK_THROWS_AS((void)performance_balance(1.0, -10.0), InvariantError);
}

TEST_CASE("controller registry") {
  const std::vector<std::string> names = controller_names();
  REQUIRE(names.size() == 3);
  const Config cfg = default_config();
  for (const std::string& n : names) {
    CHECK(make_controller(n, cfg) != nullptr);
  }
  CHECK_THROWS_AS((void)make_controller("pid", cfg), InvariantError);
}

TEST_CASE("a zero-step scenario yields an empty run with zero metrics") {
  const Config cfg = default_config();
  Scenario s = make_scenario("offset_line", 10.0, 1.0, cfg);
  s.times.resize(1);
  s.reference.resize(1);
  const RunResult r = run_closed_loop(s, "kinematic", cfg);
  CHECK(r.log.empty());
  CHECK(r.wear.total == 0.0);
  CHECK(r.errors.mean == 0.0);
  CHECK(r.omega == 0.0);
}

TEST_CASE("closed-loop runs are deterministic and internally consistent") {
  Config cfg = light_mpc_config();
  Scenario s = make_scenario("curve", 25.0, 0.3, cfg);

  const RunResult a = run_closed_loop(s, "two", cfg);
  const RunResult b = run_closed_loop(s, "two", cfg);
  REQUIRE(a.log.size() == b.log.size());
  REQUIRE(a.log.size() == static_cast<size_t>(s.steps()));
  for (size_t k = 0; k < a.log.size(); ++k) {
    CHECK(a.log[k].state.pose == b.log[k].state.pose);
    CHECK(a.log[k].cost == b.log[k].cost);
    CHECK(a.log[k].wear.p_slip_ratio == b.log[k].wear.p_slip_ratio);
  }
  CHECK(a.wear.total == b.wear.total);
  CHECK(a.omega == b.omega);

  // Metrics recompute from the log.
  const WearLedger w = wear_work(a.log, s.dt);
  CHECK(a.wear.total == w.total);
  CHECK(a.wear.total == w.slip_ratio + w.slip_angle + w.steer);
  const TrackingErrors e = tracking_errors(a.log);
  CHECK(a.errors.mean == e.mean);
  CHECK(a.omega == performance_balance(w.total, e.mean));

  // Telemetry populated by the solver.
  CHECK(a.log[0].sa_iters > 0);
  CHECK(a.log[0].cost <= a.log[0].initial_cost);
  CHECK(a.log[0].tracking_term >= 0.0);
  CHECK(a.log[0].wear_term >= 0.0);
}

TEST_CASE("the kinematic and mpc controllers share the same harness") {
  Config cfg = light_mpc_config();
  const Scenario s = make_scenario("offset_line", 10.0, 0.3, cfg);

  const RunResult kin = run_closed_loop(s, "kinematic", cfg);
  const RunResult mpc = run_closed_loop(s, "ntwo", cfg);
  CHECK(kin.log.size() == mpc.log.size());
  CHECK(kin.controller == "kinematic");
  CHECK(mpc.controller == "ntwo");
  CHECK(kin.dt == s.dt);
  // The kinematic controller reports no solver telemetry.
  CHECK(kin.log[0].sa_iters == 0);

  CHECK_THROWS_AS((void)run_closed_loop(s, "lqr", cfg), InvariantError);
}

TEST_CASE("csv logs round-trip the run metrics") {
  Config cfg = light_mpc_config();
  const Scenario s = make_scenario("curve", 20.0, 0.4, cfg);
  const RunResult r = run_closed_loop(s, "two", cfg);

  const fs::path p = temp_file("swerve_test_log.csv");
  write_csv(r, p);

  const std::string header = slurp(p).substr(0, slurp(p).find('\n'));
  CHECK(header ==
        "t,x,y,phi,x_ref,y_ref,phi_ref,"
        "delta_1l,delta_1r,delta_2l,delta_2r,"
        "omega_w_1l,omega_w_1r,omega_w_2l,omega_w_2r,"
        "omega_s_1l,omega_s_1r,omega_s_2l,omega_s_2r,"
        "P_s,P_alpha,P_t,J,sa_iters,clamped");

  const RunResult back = read_csv(p);
  fs::remove(p);

  REQUIRE(back.log.size() == r.log.size());
  CHECK(back.dt == doctest::Approx(r.dt).epsilon(1e-9));
  CHECK(back.wear.total == doctest::Approx(r.wear.total).epsilon(1e-9));
  CHECK(back.wear.slip_ratio == doctest::Approx(r.wear.slip_ratio).epsilon(1e-9));
  CHECK(back.errors.x_cm == doctest::Approx(r.errors.x_cm).epsilon(1e-9));
  CHECK(back.errors.mean == doctest::Approx(r.errors.mean).epsilon(1e-9));
  CHECK(back.omega == doctest::Approx(r.omega).epsilon(1e-9));

  // Identical reruns produce byte-identical logs.
  const fs::path p2 = temp_file("swerve_test_log2.csv");
  write_csv(run_closed_loop(s, "two", cfg), p2);
  const fs::path p3 = temp_file("swerve_test_log3.csv");
  write_csv(run_closed_loop(s, "two", cfg), p3);
  CHECK(slurp(p2) == slurp(p3));
  fs::remove(p2);
  fs::remove(p3);
}

TEST_CASE("metrics files carry the summary keys") {
  Config cfg = default_config();
  const Scenario s = make_scenario("offset_line", 10.0, 0.3, cfg);
  const RunResult r = run_closed_loop(s, "kinematic", cfg);

  const fs::path p = temp_file("swerve_test_metrics.txt");
  write_metrics(r, p);
  const std::string text = slurp(p);
  fs::remove(p);

  for (const char* key : {"scenario=", "controller=", "W_s=", "W_alpha=", "W_t=",
                          "W_tw=", "e_x_cm=", "e_y_cm=", "e_phi_deg=", "e_bar=",
                          "omega="}) {
    CHECK(text.find(key) != std::string::npos);
  }

  // W_tw printed equals the channel sum, machine-precision exact.
  std::istringstream in(text);
  std::string line;
  double ws = 0, wa = 0, wt = 0, wtw = -1;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string k = line.substr(0, eq);
    const std::string v = line.substr(eq + 1);
    if (k == "W_s") ws = std::stod(v);
    if (k == "W_alpha") wa = std::stod(v);
    if (k == "W_t") wt = std::stod(v);
    if (k == "W_tw") wtw = std::stod(v);
  }
  CHECK(wtw == doctest::Approx(ws + wa + wt).epsilon(1e-9));
}

TEST_CASE("mass override re-derives loads inside the runner") {
  Config cfg = default_config();
  Scenario s = make_scenario("offset_line", 10.0, 0.2, cfg);

  RunResult base = run_closed_loop(s, "kinematic", cfg);
  s.mass_override = 20000.0;
  RunResult heavy = run_closed_loop(s, "kinematic", cfg);
  // Heavier vehicle, same controller: more steering-loss work (k_t F_N w_s).
  CHECK(heavy.wear.steer > base.wear.steer);
}

TEST_CASE("the built-in validation suite passes") {
  std::ostringstream out;
  CHECK(run_validation_suite(out));
  CHECK(out.str().find("FAIL") == std::string::npos);
}
