#pragma once

// Configuration-driven experiments: single runs, the temperature-amplitude
// sweep, constant calibration and the verification suites behind `bsq`.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsq/config.hpp"
#include "bsq/solver.hpp"

namespace bsq {

enum class Preset { stratified, shear, vortex_pair, random_seeded };

std::string to_string(Preset preset);

struct RunConfig {
  std::string run_id = "run";
  std::filesystem::path output_dir = ".";
  Preset preset = Preset::vortex_pair;
  std::uint64_t seed = 0;
  double eps_theta = 1.0;  ///< temperature amplitude (0 gives theta = 0)
  double eps_u = 1.0;      ///< vorticity amplitude
  SolverConfig solver;
  int snapshot_stride = 0;  ///< write .bsqf snapshots every k steps (0: none)

  void validate() const;
};

/// Documented schema; unknown sections or keys are rejected.
RunConfig parse_run_config(const ConfigFile& file);
RunConfig load_run_config(const std::string& path);

/// Initial state of a preset:
///   stratified:    theta = eps_theta sin x2,                 w = 0
///   shear:         theta = eps_theta sin x2,                 w = eps_u cos x2
///   vortex_pair:   theta = eps_theta (cos x1 + cos x2) / 2,  w = eps_u (cos x1 + cos x2)
///   random_seeded: seeded band-limited theta and w (|k| <= 8), unit L^2 before scaling
SolverState initial_state(const RunConfig& cfg);

struct RunSummary {
  double final_t = 0.0;
  StopReason reason = StopReason::stop_time;
  int steps = 0;
  double Omega0 = 0.0;
  double Theta0 = 0.0;
  double theta_l2_drift = 0.0;     ///< max relative drift of ||theta||_2
  double theta_mean_drift = 0.0;
  double omega_mean_drift = 0.0;
  double energy_balance = 0.0;     ///< max |E(t) - E(0) - int theta u2| / max E
};

RunSummary summarize(const Trajectory& traj);
nlohmann::json to_json(const RunSummary& summary, const SolverConfig& solver);

/// Energy-balance residual of a trajectory (trapezoidal work integral).
double energy_balance_residual(std::span<const DiagnosticsRecord> records);

/// 64-bit FNV-1a hash, used to fingerprint trajectories.
std::uint64_t fnv1a(std::string_view bytes);

/// Runs one simulation, writing diag.csv, snapshots and summary.json under
/// output_dir/run_id. Returns the trajectory.
Trajectory cmd_simulate(const RunConfig& cfg);

struct SweepRow {
  double eps = 0.0;
  double T_num = 0.0;
  StopReason trigger = StopReason::stop_time;
  double Omega0 = 0.0;
  double Theta0 = 0.0;
  double C = 0.0;
  std::optional<double> T_bound;  ///< empty when the bound is undefined (C = 0)
};

struct SweepFit {
  bool valid = false;
  double intercept = 0.0;
  double slope = 0.0;  ///< T_num ~ intercept + slope * log log(1/eps)
  int points = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double C = 0.0;
  SweepFit fit;
};

/// Scales theta_0 by each eps (w_0 fixed). eps must be strictly decreasing and
/// positive, except that a final 0 is allowed (pure Euler row). When `C` is
/// empty, it is calibrated on the first row's trajectory. Runs rows on up to
/// `threads` workers and writes sweep.csv and sweep.json.
SweepResult cmd_sweep(const RunConfig& cfg, const std::vector<double>& eps,
                      std::optional<double> C = std::nullopt, int threads = 1);

struct CalibrationResult {
  TransportReport report;
  double C = 0.0;
  std::uint64_t trajectory_hash = 0;
  int records = 0;
};

/// Runs the configured trajectory and the transport-bound bisection; writes
/// calibration.json. Throws if the trajectory has fewer than 10 records.
CalibrationResult cmd_calibrate(const RunConfig& cfg);

struct VerifyOutcome {
  nlohmann::json report;
  bool passed = true;
};

/// Suites: lp, bony, solver, diagnostics, all. Throws std::invalid_argument
/// for anything else.
VerifyOutcome cmd_verify(const std::string& suite);

/// Worker count from BSQ_THREADS (default: hardware concurrency, at least 1).
int worker_threads();

}  // namespace bsq
