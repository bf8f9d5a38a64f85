#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bsq/experiment.hpp"

using namespace bsq;
namespace fs = std::filesystem;

namespace {

ConfigFile parse(const std::string& text) {
  std::istringstream in(text);
  return ConfigFile::parse(in, "test.cfg");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bsq_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string error_of(const std::string& text) {
  try {
    parse_run_config(parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config file syntax") {
  const ConfigFile f = parse("# comment\n[run]\nid = abc  # trailing\n\n[solver]\nn=64\n");
  CHECK(f.get_string("run", "id") == "abc");
  CHECK(f.get_int("solver", "n") == 64);
  CHECK(f.get_double("solver", "cfl", 0.3) == 0.3);
  CHECK_THROWS_AS(parse("id = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nid = 1\nid = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\n[run]\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\njunk\n"), ConfigError);
  CHECK_THROWS_AS(parse("[solver]\nn = 6x\n").get_int("solver", "n"), ConfigError);
  CHECK_THROWS_AS(parse("[solver]\n").get_int("solver", "n"), ConfigError);
}

TEST_CASE("run config defaults and presets") {
  const RunConfig cfg = parse_run_config(parse("[run]\nid = x\n"));
  CHECK(cfg.preset == Preset::vortex_pair);
  CHECK(cfg.solver.grid.n() == 128);
  CHECK(cfg.solver.r == 2.0);
  CHECK(cfg.solver.filter.kind == FilterKind::none);

  const RunConfig seeded = parse_run_config(parse("[run]\npreset = random_seeded(42)\n"));
  CHECK(seeded.preset == Preset::random_seeded);
  CHECK(seeded.seed == 42);
  const RunConfig big = parse_run_config(parse("[run]\npreset = random_seeded\nseed = 18446744073709551615\n"));
  CHECK(big.seed == 18446744073709551615ULL);

  const RunConfig filtered =
      parse_run_config(parse("[solver]\nfilter = exponential\nfilter_order = 24\nn = 64\n"));
  CHECK(filtered.solver.filter.kind == FilterKind::exponential);
  CHECK(filtered.solver.filter.order == 24);
}

TEST_CASE("invalid configs name the offending line") {
  CHECK(error_of("[run]\nid = a\n[solver]\nn = 4\n").find("test.cfg:4:") == 0);
  CHECK(error_of("[run]\nid = a\n[solver]\nn = 4\n").find(">= 8") != std::string::npos);
  CHECK(error_of("[run]\nbogus = 1\n").find("test.cfg:2:") == 0);
  CHECK(error_of("[extra]\n").find("test.cfg:1:") == 0);
  CHECK(error_of("[run]\npreset = tornado\n").find("test.cfg:2:") == 0);
  CHECK(error_of("[run]\npreset = shear(3)\n").find("test.cfg:2:") == 0);
  CHECK(error_of("[run]\n\neps_u = -1\n").find("test.cfg:3:") == 0);
  CHECK(error_of("[solver]\ncfl = 2\n").find("test.cfg:2:") == 0);
  CHECK(error_of("[solver]\nfilter = gaussian\n").find("test.cfg:2:") == 0);
  CHECK(error_of("[run]\neps_theta = 0\n").empty());
}

TEST_CASE("initial states of the presets") {
  RunConfig cfg;
  cfg.solver.grid = Grid(32);
  cfg.eps_theta = 0.5;
  cfg.eps_u = 2.0;
  cfg.preset = Preset::stratified;
  SolverState s = initial_state(cfg);
  CHECK(std::abs(s.theta().at(0, 1) - Complex(0.0, -0.25)) < 1e-15);
  CHECK(lebesgue_norm(s.omega(), 2.0) == 0.0);

  cfg.preset = Preset::shear;
  s = initial_state(cfg);
  CHECK(std::abs(s.omega().at(0, 1) - Complex(1.0)) < 1e-15);

  cfg.preset = Preset::vortex_pair;
  s = initial_state(cfg);
  CHECK(std::abs(s.omega().at(1, 0) - Complex(1.0)) < 1e-15);
  CHECK(std::abs(s.theta().at(0, 1) - Complex(0.125)) < 1e-15);

  cfg.preset = Preset::random_seeded;
  cfg.seed = 42;
  s = initial_state(cfg);
  CHECK(lebesgue_norm(s.omega(), 2.0) == doctest::Approx(2.0));
  CHECK(lebesgue_norm(s.theta(), 2.0) == doctest::Approx(0.5));
  cfg.solver.grid = Grid(64);
  const SolverState fine = initial_state(cfg);
  CHECK(std::abs(fine.omega().at(3, -5) - s.omega().at(3, -5)) < 1e-15);

  cfg.eps_theta = 0.0;
  CHECK(lebesgue_norm(initial_state(cfg).theta(), 2.0) == 0.0);
}

TEST_CASE("simulate writes artifacts and is deterministic") {
  const fs::path dir = scratch("simulate");
  RunConfig cfg;
  cfg.run_id = "rs";
  cfg.output_dir = dir;
  cfg.preset = Preset::random_seeded;
  cfg.seed = 42;
  cfg.solver.grid = Grid(64);
  cfg.solver.stop_time = 0.2;
  cfg.snapshot_stride = 2;
  const Trajectory a = cmd_simulate(cfg);
  const std::string diag_a = slurp(dir / "rs" / "diag.csv");
  CHECK(diag_a.rfind("t,Omega,Theta,grad_u_inf,omega_inf,grad_theta_inf,I1,I2,I3\n", 0) == 0);
  CHECK(fs::exists(dir / "rs" / "theta_00000000.bsqf"));
  CHECK(fs::exists(dir / "rs" / "omega_00000002.bsqf"));
  const nlohmann::json summary = nlohmann::json::parse(slurp(dir / "rs" / "summary.json"));
  CHECK(summary["trigger"] == to_string(a.reason));
  CHECK(summary["filter"]["kind"] == "none");
  CHECK(summary.contains("drifts"));

  cmd_simulate(cfg);
  CHECK(slurp(dir / "rs" / "diag.csv") == diag_a);
  fs::remove_all(dir);
}

TEST_CASE("steady shear simulation has negligible drifts") {
  const fs::path dir = scratch("shear");
  RunConfig cfg;
  cfg.output_dir = dir;
  cfg.preset = Preset::shear;
  cfg.solver.grid = Grid(32);
  cfg.solver.stop_time = 1.0;
  const RunSummary s = summarize(cmd_simulate(cfg));
  CHECK(s.reason == StopReason::stop_time);
  CHECK(s.theta_l2_drift <= 1e-12);
  CHECK(s.energy_balance <= 1e-12);
  fs::remove_all(dir);
}

TEST_CASE("sweep rows, bound consistency and the Euler row") {
  const fs::path dir = scratch("sweep");
  RunConfig cfg;
  cfg.run_id = "sw";
  cfg.output_dir = dir;
  cfg.solver.grid = Grid(32);
  cfg.solver.stop_time = 2.0;
  const SweepResult r = cmd_sweep(cfg, {1.0, 0.5, 0.0}, std::nullopt, 2);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row.C == r.C);
    if (row.Theta0 > 0.0 && r.C > 0.0) {
      REQUIRE(row.T_bound.has_value());
      CHECK(*row.T_bound == lifespan_lower_bound_2d(row.Omega0, row.Theta0, r.C).bound);
    }
  }
  CHECK(r.rows[2].Theta0 == 0.0);
  CHECK(r.rows[2].trigger == StopReason::stop_time);
  CHECK(r.rows[2].T_num == doctest::Approx(2.0));
  CHECK(fs::exists(dir / "sw" / "sweep.csv"));
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "sw" / "sweep.json"));
  CHECK(j["rows"].size() == 3);

  // Thread count does not change results.
  const SweepResult serial = cmd_sweep(cfg, {1.0, 0.5, 0.0}, std::nullopt, 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(serial.rows[i].T_num == r.rows[i].T_num);

  CHECK_THROWS_AS(cmd_sweep(cfg, {0.5, 1.0}), ContractViolation);
  CHECK_THROWS_AS(cmd_sweep(cfg, {1.0, 0.0, 0.5}), ContractViolation);
  CHECK_THROWS_AS(cmd_sweep(cfg, {1.0, -0.5}), ContractViolation);
  CHECK_THROWS_AS(cmd_sweep(cfg, {}), ContractViolation);
  fs::remove_all(dir);
}

TEST_CASE("calibration") {
  const fs::path dir = scratch("calibrate");
  RunConfig cfg;
  cfg.run_id = "cal";
  cfg.output_dir = dir;
  cfg.solver.grid = Grid(32);
  cfg.solver.stop_time = 0.5;
  cfg.preset = Preset::shear;
  cfg.eps_theta = 0.0;
  const CalibrationResult shear = cmd_calibrate(cfg);
  CHECK(shear.C == 0.0);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "cal" / "calibration.json"));
  CHECK(j["C"] == 0.0);
  CHECK(j["trajectory_hash"].get<std::string>().size() == 16);

  cfg.preset = Preset::vortex_pair;
  cfg.eps_theta = 0.1;
  const CalibrationResult a = cmd_calibrate(cfg);
  const CalibrationResult b = cmd_calibrate(cfg);
  CHECK(std::isfinite(a.C));
  CHECK(a.C == b.C);
  CHECK(a.trajectory_hash == b.trajectory_hash);

  cfg.solver.stop_time = 0.01;
  CHECK_THROWS_AS(cmd_calibrate(cfg), ContractViolation);
  fs::remove_all(dir);
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("verify dispatch") {
  const VerifyOutcome lp = cmd_verify("lp");
  CHECK(lp.passed);
  CHECK(lp.report["suite"] == "lp");
  for (const auto& r : lp.report["results"]) CHECK(r["passed"] == true);
  CHECK_THROWS_AS(cmd_verify("unknown"), std::invalid_argument);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("cli");
  const std::string cli = BSQ_CLI_PATH;
  const auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(run("verify --suite unknown") == 2);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);

  std::ofstream(dir / "bad.cfg") << "[run]\nid = bad\n[solver]\nn = 4\n";
  CHECK(run("simulate -c " + (dir / "bad.cfg").string()) != 0);
  const std::string err = (dir / "err.txt").string();
  CHECK(std::system((cli + " simulate -c " + (dir / "bad.cfg").string() + " >/dev/null 2>" + err).c_str()) != 0);
  CHECK(slurp(err).find("bad.cfg:4:") != std::string::npos);

  std::ofstream(dir / "ok.cfg") << "[run]\nid = ok\noutput_dir = " << dir.string()
                                << "\npreset = shear\n[solver]\nn = 16\nstop_time = 0.1\n";
  CHECK(run("simulate -c " + (dir / "ok.cfg").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "summary.json"));
  CHECK(run("sweep -c " + (dir / "ok.cfg").string() + " --eps 1,0.5,0") == 0);
  CHECK(run("sweep -c " + (dir / "ok.cfg").string() + " --eps 1,x") == 2);
  fs::remove_all(dir);
}
