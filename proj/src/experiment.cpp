#include "bsq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "bsq/random_fields.hpp"
#include "bsq/snapshot.hpp"

namespace bsq {

namespace fs = std::filesystem;

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::stratified: return "stratified";
    case Preset::shear: return "shear";
    case Preset::vortex_pair: return "vortex_pair";
    case Preset::random_seeded: return "random_seeded";
  }
  return "unknown";
}

void RunConfig::validate() const {
  if (run_id.empty() || run_id.find('/') != std::string::npos) {
    throw ContractViolation("RunConfig: run id must be a nonempty name without '/'");
  }
  if (!(eps_theta >= 0.0) || std::isinf(eps_theta)) {
    throw ContractViolation("RunConfig: eps_theta must be finite and >= 0");
  }
  if (!(eps_u > 0.0) || std::isinf(eps_u)) {
    throw ContractViolation("RunConfig: eps_u must be finite and > 0");
  }
  if (snapshot_stride < 0) throw ContractViolation("RunConfig: snapshot_stride must be >= 0");
  solver.validate();
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"run", {"id", "output_dir", "preset", "seed", "eps_theta", "eps_u", "r", "snapshot_stride"}},
      {"solver",
       {"n", "cfl", "dt_max", "filter", "filter_order", "filter_strength", "stop_time",
        "tail_fraction", "omega_growth"}}};
  return s;
}

Preset parse_preset(const ConfigFile& file, std::string text, std::optional<std::uint64_t>& seed) {
  // random_seeded(42) carries its seed inline.
  const auto open = text.find('(');
  if (open != std::string::npos) {
    if (text.back() != ')') file.fail("run", "preset", "malformed preset `" + text + "`");
    const std::string arg = text.substr(open + 1, text.size() - open - 2);
    text = text.substr(0, open);
    if (text != "random_seeded") file.fail("run", "preset", "only random_seeded takes a seed");
    try {
      std::size_t used = 0;
      seed = std::stoull(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      file.fail("run", "preset", "bad seed `" + arg + "`");
    }
  }
  if (text == "stratified") return Preset::stratified;
  if (text == "shear") return Preset::shear;
  if (text == "vortex_pair") return Preset::vortex_pair;
  if (text == "random_seeded") return Preset::random_seeded;
  file.fail("run", "preset",
            "unknown preset `" + text + "` (stratified, shear, vortex_pair, random_seeded)");
}

}  // namespace

RunConfig parse_run_config(const ConfigFile& file) {
  file.require_known(schema());
  RunConfig cfg;
  cfg.run_id = file.get_string("run", "id", "run");
  cfg.output_dir = file.get_string("run", "output_dir", ".");
  std::optional<std::uint64_t> inline_seed;
  cfg.preset = parse_preset(file, file.get_string("run", "preset", "vortex_pair"), inline_seed);
  cfg.seed = file.get_uint64("run", "seed", inline_seed.value_or(0));
  cfg.eps_theta = file.get_double("run", "eps_theta", 1.0);
  if (!(cfg.eps_theta >= 0.0)) file.fail("run", "eps_theta", "must be >= 0");
  cfg.eps_u = file.get_double("run", "eps_u", 1.0);
  if (!(cfg.eps_u > 0.0)) file.fail("run", "eps_u", "must be > 0");
  cfg.solver.r = file.get_double("run", "r", 2.0);
  if (!(cfg.solver.r > 1.0) || std::isinf(cfg.solver.r)) file.fail("run", "r", "must lie in (1, inf)");
  cfg.snapshot_stride = static_cast<int>(file.get_int("run", "snapshot_stride", 0));
  if (cfg.snapshot_stride < 0) file.fail("run", "snapshot_stride", "must be >= 0");

  const long long n = file.get_int("solver", "n", 128);
  try {
    cfg.solver.grid = Grid(static_cast<int>(n));
  } catch (const ContractViolation& e) {
    file.fail("solver", "n", e.what());
  }
  cfg.solver.cfl = file.get_double("solver", "cfl", 0.4);
  if (!(cfg.solver.cfl > 0.0 && cfg.solver.cfl <= 1.0)) file.fail("solver", "cfl", "must lie in (0, 1]");
  cfg.solver.dt_max = file.get_double("solver", "dt_max", 0.05);
  if (!(cfg.solver.dt_max > 0.0)) file.fail("solver", "dt_max", "must be positive");
  const std::string filter = file.get_string("solver", "filter", "none");
  if (filter == "none") {
    cfg.solver.filter.kind = FilterKind::none;
  } else if (filter == "exponential") {
    cfg.solver.filter.kind = FilterKind::exponential;
  } else {
    file.fail("solver", "filter", "expected `none` or `exponential`");
  }
  cfg.solver.filter.order = static_cast<int>(file.get_int("solver", "filter_order", 36));
  cfg.solver.filter.strength = file.get_double("solver", "filter_strength", 36.0);
  cfg.solver.stop_time = file.get_double("solver", "stop_time", 1.0);
  if (!(cfg.solver.stop_time > 0.0)) file.fail("solver", "stop_time", "must be positive");
  cfg.solver.thresholds.tail_fraction = file.get_double("solver", "tail_fraction", 1e-3);
  const double tau = cfg.solver.thresholds.tail_fraction;
  if (!(tau > 0.0 && tau < 1.0)) file.fail("solver", "tail_fraction", "must lie in (0, 1)");
  cfg.solver.thresholds.omega_growth = file.get_double("solver", "omega_growth", 100.0);
  if (!(cfg.solver.thresholds.omega_growth > 1.0)) file.fail("solver", "omega_growth", "must exceed 1");
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(file.source(), 0, e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(ConfigFile::load(path)); }

SolverState initial_state(const RunConfig& cfg) {
  const Grid& grid = cfg.solver.grid;
  const double et = cfg.eps_theta;
  const double eu = cfg.eps_u;
  switch (cfg.preset) {
    case Preset::stratified:
      return SolverState::from_physical(
          0.0, RealField::sample(grid, [&](double, double y) { return et * std::sin(y); }),
          RealField::zeros(grid));
    case Preset::shear:
      return SolverState::from_physical(
          0.0, RealField::sample(grid, [&](double, double y) { return et * std::sin(y); }),
          RealField::sample(grid, [&](double, double y) { return eu * std::cos(y); }));
    case Preset::vortex_pair:
      return SolverState::from_physical(
          0.0,
          RealField::sample(grid,
                            [&](double x, double y) { return 0.5 * et * (std::cos(x) + std::cos(y)); }),
          RealField::sample(grid, [&](double x, double y) { return eu * (std::cos(x) + std::cos(y)); }));
    case Preset::random_seeded: {
      RandomFieldSpec spec;
      spec.max_wavenumber = std::min(8, grid.dealias_cutoff());
      spec.seed = cfg.seed;
      const SpectralField omega = eu * random_field(grid, spec);
      spec.seed = cfg.seed ^ 0x9e3779b97f4a7c15ULL;
      const SpectralField theta = et * random_field(grid, spec);
      return SolverState(0.0, theta, omega);
    }
  }
  throw ContractViolation("initial_state: unknown preset");
}

double energy_balance_residual(std::span<const DiagnosticsRecord> records) {
  if (records.empty()) return 0.0;
  double work = 0.0;
  double peak = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (i > 0) {
      work += 0.5 * (records[i].t - records[i - 1].t) *
              (records[i].buoyancy_work + records[i - 1].buoyancy_work);
    }
    peak = std::max(peak, records[i].energy);
    worst = std::max(worst, std::abs(records[i].energy - records.front().energy - work));
  }
  return peak > 0.0 ? worst / peak : worst;
}

RunSummary summarize(const Trajectory& traj) {
  RunSummary s;
  s.final_t = traj.stop_t;
  s.reason = traj.reason;
  s.steps = traj.steps;
  if (traj.records.empty()) return s;
  const auto& first = traj.records.front();
  s.Omega0 = first.Omega;
  s.Theta0 = first.Theta;
  for (const auto& rec : traj.records) {
    const double l2 = first.theta_l2 > 0.0 ? std::abs(rec.theta_l2 - first.theta_l2) / first.theta_l2
                                           : rec.theta_l2;
    s.theta_l2_drift = std::max(s.theta_l2_drift, l2);
    s.theta_mean_drift = std::max(s.theta_mean_drift, std::abs(rec.theta_mean - first.theta_mean));
    s.omega_mean_drift = std::max(s.omega_mean_drift, std::abs(rec.omega_mean - first.omega_mean));
  }
  s.energy_balance = energy_balance_residual(traj.records);
  return s;
}

nlohmann::json to_json(const RunSummary& summary, const SolverConfig& solver) {
  nlohmann::json filter{{"kind", solver.filter.kind == FilterKind::none ? "none" : "exponential"}};
  if (solver.filter.kind == FilterKind::exponential) {
    filter["order"] = solver.filter.order;
    filter["strength"] = solver.filter.strength;
  }
  return {{"final_t", summary.final_t},
          {"trigger", to_string(summary.reason)},
          {"steps", summary.steps},
          {"n", solver.grid.n()},
          {"r", solver.r},
          {"filter", filter},
          {"Omega0", summary.Omega0},
          {"Theta0", summary.Theta0},
          {"drifts",
           {{"theta_l2_relative", summary.theta_l2_drift},
            {"theta_mean", summary.theta_mean_drift},
            {"omega_mean", summary.omega_mean_drift},
            {"energy_balance_relative", summary.energy_balance}}}};
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string snapshot_name(const char* field, int step) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%08d.bsqf", field, step);
  return buf;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// Simulation with diag.csv (and optional snapshots) written into `dir`.
Trajectory run_into(const RunConfig& cfg, const fs::path& dir, std::string* diag_text = nullptr) {
  fs::create_directories(dir);
  std::ostringstream diag;
  write_diag_header(diag);
  const StepObserver observer = [&](int step, const SolverState& state, const DiagnosticsRecord& rec) {
    write_diag_row(diag, rec);
    if (cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0) {
      write_snapshot(dir / snapshot_name("theta", step), to_physical(state.theta()));
      write_snapshot(dir / snapshot_name("omega", step), to_physical(state.omega()));
    }
  };
  Trajectory traj = simulate(initial_state(cfg), cfg.solver, observer);
  std::ofstream out(dir / "diag.csv");
  out << diag.str();
  if (diag_text) *diag_text = diag.str();
  return traj;
}

}  // namespace

Trajectory cmd_simulate(const RunConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.output_dir / cfg.run_id;
  Trajectory traj = run_into(cfg, dir);
  nlohmann::json summary = to_json(summarize(traj), cfg.solver);
  summary["run_id"] = cfg.run_id;
  summary["preset"] = to_string(cfg.preset);
  summary["seed"] = cfg.seed;
  summary["eps_theta"] = cfg.eps_theta;
  summary["eps_u"] = cfg.eps_u;
  write_json(dir / "summary.json", summary);
  return traj;
}

int worker_threads() {
  if (const char* env = std::getenv("BSQ_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void check_eps_list(const std::vector<double>& eps) {
  if (eps.empty()) throw ContractViolation("sweep: empty eps list");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const bool last = i + 1 == eps.size();
    if (!(eps[i] > 0.0 || (last && eps[i] == 0.0)) || std::isinf(eps[i])) {
      throw ContractViolation("sweep: eps values must be positive (a final 0 is allowed)");
    }
    if (i > 0 && !(eps[i] < eps[i - 1])) {
      throw ContractViolation("sweep: eps values must be strictly decreasing");
    }
  }
}

SweepFit fit_loglog(const std::vector<SweepRow>& rows) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : rows) {
    if (row.eps > 0.0 && row.eps < std::exp(-1.0) && row.trigger != StopReason::stop_time) {
      pts.emplace_back(std::log(std::log(1.0 / row.eps)), row.T_num);
    }
  }
  SweepFit fit;
  fit.points = static_cast<int>(pts.size());
  if (pts.size() < 2) return fit;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(pts.size());
  const double det = m * sxx - sx * sx;
  if (det == 0.0) return fit;
  fit.slope = (m * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.valid = true;
  return fit;
}

}  // namespace

SweepResult cmd_sweep(const RunConfig& cfg, const std::vector<double>& eps,
                      std::optional<double> C, int threads) {
  cfg.validate();
  check_eps_list(eps);
  const fs::path dir = cfg.output_dir / cfg.run_id;
  fs::create_directories(dir);

  struct RowRun {
    Trajectory traj;
    bool done = false;
  };
  std::vector<RowRun> runs(eps.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&] {
    for (std::size_t i = next++; i < eps.size(); i = next++) {
      try {
        RunConfig row = cfg;
        row.eps_theta = cfg.eps_theta * eps[i];
        row.snapshot_stride = 0;
        std::ostringstream name;
        name << "eps_" << std::setw(2) << std::setfill('0') << i;
        runs[i].traj = run_into(row, dir / name.str());
        runs[i].done = true;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int pool = std::clamp(threads, 1, static_cast<int>(eps.size()));
  std::vector<std::thread> workers;
  for (int t = 1; t < pool; ++t) workers.emplace_back(worker);
  worker();
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);

  SweepResult result;
  result.C = C ? *C : transport_bound_check(runs.front().traj.records, 0.0).calibrated_C();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const Trajectory& traj = runs[i].traj;
    SweepRow row;
    row.eps = eps[i];
    row.T_num = traj.lifespan();
    row.trigger = traj.reason;
    row.Omega0 = traj.records.front().Omega;
    row.Theta0 = traj.records.front().Theta;
    row.C = result.C;
    if (result.C > 0.0 && std::isfinite(result.C) && row.Omega0 > 0.0) {
      row.T_bound = row.Theta0 > 0.0
                        ? lifespan_lower_bound_2d(row.Omega0, row.Theta0, result.C).bound
                        : INFINITY;
    }
    result.rows.push_back(row);
  }
  result.fit = fit_loglog(result.rows);

  std::ofstream csv(dir / "sweep.csv");
  csv << "eps,T_num,trigger,Omega0,Theta0,C,T_bound\n" << std::setprecision(17);
  for (const auto& row : result.rows) {
    csv << row.eps << ',' << row.T_num << ',' << to_string(row.trigger) << ',' << row.Omega0 << ','
        << row.Theta0 << ',' << row.C << ',';
    if (row.T_bound) csv << *row.T_bound;
    csv << '\n';
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) {
    rows.push_back({{"eps", row.eps},
                    {"T_num", row.T_num},
                    {"trigger", to_string(row.trigger)},
                    {"Omega0", row.Omega0},
                    {"Theta0", row.Theta0},
                    {"T_bound", row.T_bound ? nlohmann::json(*row.T_bound) : nlohmann::json()},
                    {"T_bound_le_T_num", row.T_bound ? nlohmann::json(*row.T_bound <= row.T_num)
                                                     : nlohmann::json()}});
  }
  write_json(dir / "sweep.json",
             {{"run_id", cfg.run_id},
              {"preset", to_string(cfg.preset)},
              {"n", cfg.solver.grid.n()},
              {"C", result.C},
              {"C_is_empirical", true},
              {"rows", rows},
              {"loglog_fit",
               {{"valid", result.fit.valid},
                {"intercept", result.fit.intercept},
                {"slope", result.fit.slope},
                {"points", result.fit.points}}}});
  return result;
}

CalibrationResult cmd_calibrate(const RunConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.output_dir / cfg.run_id;
  std::string diag;
  const Trajectory traj = run_into(cfg, dir, &diag);
  if (traj.records.size() < 10) {
    std::ostringstream msg;
    msg << "calibrate: trajectory too short (" << traj.records.size() << " records, need >= 10)";
    throw ContractViolation(msg.str());
  }
  CalibrationResult result;
  result.report = transport_bound_check(traj.records, 0.0);
  result.C = result.report.calibrated_C();
  result.trajectory_hash = fnv1a(diag);
  result.records = static_cast<int>(traj.records.size());
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << result.trajectory_hash;
  write_json(dir / "calibration.json", {{"C", result.C},
                                        {"C_is_empirical", true},
                                        {"trajectory_hash", hash.str()},
                                        {"records", result.records},
                                        {"n", cfg.solver.grid.n()},
                                        {"transport", to_json(result.report)}});
  return result;
}

}  // namespace bsq
