#pragma once

// Pseudo-spectral integration of the inviscid 2D Boussinesq system in
// vorticity form,
//
//   d_t theta + u . grad theta = 0,
//   d_t w     + u . grad w     = d_1 theta,     u = (-d_2 psi, d_1 psi), -Lap psi = w,
//
// with classical RK4 in time and 2/3-rule dealiasing of every product.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bsq/diagnostics.hpp"
#include "bsq/state.hpp"

namespace bsq {

enum class FilterKind { none, exponential };

/// exp(-strength (|k_i| / k_c)^order) applied per axis once per step.
struct SpectralFilter {
  FilterKind kind = FilterKind::none;
  int order = 36;
  double strength = 36.0;
};

struct BlowUpThresholds {
  double tail_fraction = 1e-3;  ///< energy fraction beyond k_c / 2
  double omega_growth = 100.0;  ///< Omega(t) >= M Omega(0)
};

struct SolverConfig {
  Grid grid{64};
  double cfl = 0.4;
  double dt_max = 0.05;
  SpectralFilter filter;
  double stop_time = 1.0;
  BlowUpThresholds thresholds;
  double r = 2.0;             ///< Lebesgue exponent of the tracked norms
  int snapshot_stride = 0;    ///< keep every k-th state in the trajectory (0: none)

  void validate() const;
};

struct Tendency {
  SpectralField dtheta;
  SpectralField domega;
};

/// Right-hand side of the evolution. Mean modes of both tendencies are zero.
Tendency rhs(const SolverState& state);

struct StepOptions {
  double cfl = 0.4;
  SpectralFilter filter;
  bool force = false;  ///< skip the CFL check
};

/// Largest dt allowed by cfl * dx / ||u||_inf (infinite for a fluid at rest).
double admissible_dt(const SolverState& state, double cfl);

/// One RK4 step. Throws CflViolation (carrying the admissible dt) unless forced,
/// NonFiniteState when the result is not finite.
SolverState time_step(const SolverState& state, double dt, const StepOptions& options = {});

enum class StopReason { stop_time, tail_fraction, omega_growth, non_finite };

std::string to_string(StopReason reason);

struct Snapshot {
  int step = 0;
  SolverState state;
};

struct Trajectory {
  std::vector<DiagnosticsRecord> records;  ///< one per step, starting with t = 0
  std::vector<Snapshot> snapshots;
  std::optional<SolverState> final_state;
  StopReason reason = StopReason::stop_time;
  double stop_t = 0.0;                     ///< time the run ended (trigger or stop time)
  int steps = 0;
  SpectralFilter filter;

  /// Lifespan proxy: the time the run ended.
  double lifespan() const { return stop_t; }
};

/// Called after every accepted step (and once for the initial state, step 0).
using StepObserver = std::function<void(int step, const SolverState&, const DiagnosticsRecord&)>;

/// Advances until stop_time or a blow-up trigger. A non-finite step ends the
/// run with the last valid state.
Trajectory simulate(const SolverState& initial, const SolverConfig& config,
                    const StepObserver& observer = {});

/// (t, theta, w) -> (t / eps, eps^2 theta, eps w).
SolverState apply_scaling(const SolverState& state, double eps);

/// Pressure from Lap P = d_2 theta - sum_ij d_i u^j d_j u^i, zero mean.
RealField recover_pressure(const SolverState& state);
/// Right-hand side of the pressure equation, in spectral form.
SpectralField pressure_source(const SolverState& state);

}  // namespace bsq
