#include "bsq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bsq {

SolverState::SolverState(double t, SpectralField theta, SpectralField omega)
    : t_(t), theta_(dealias(theta)), omega_(dealias(omega)) {
  require_same_grid(theta_.grid(), omega_.grid(), "SolverState");
  if (!std::isfinite(t)) throw ContractViolation("SolverState: non-finite time");
  if (std::abs(omega_.mean()) > 1e-10) {
    std::ostringstream msg;
    msg << "SolverState: vorticity must have zero mean (mean = " << omega_.mean() << ")";
    throw PreconditionError(msg.str());
  }
  omega_.coeffs()(0, 0) = 0.0;
}

SolverState SolverState::from_physical(double t, const RealField& theta, const RealField& omega) {
  return SolverState(t, to_spectral(theta), to_spectral(omega));
}

void SolverConfig::validate() const {
  std::ostringstream msg;
  if (!(cfl > 0.0 && cfl <= 1.0)) msg << "cfl must lie in (0, 1] (got " << cfl << "); ";
  if (!(dt_max > 0.0)) msg << "dt_max must be positive (got " << dt_max << "); ";
  if (!(stop_time > 0.0)) msg << "stop_time must be positive (got " << stop_time << "); ";
  if (!(thresholds.tail_fraction > 0.0 && thresholds.tail_fraction < 1.0)) {
    msg << "tail_fraction must lie in (0, 1) (got " << thresholds.tail_fraction << "); ";
  }
  if (!(thresholds.omega_growth > 1.0)) {
    msg << "omega_growth must exceed 1 (got " << thresholds.omega_growth << "); ";
  }
  if (!(r > 1.0) || std::isinf(r)) msg << "r must lie in (1, inf) (got " << r << "); ";
  if (snapshot_stride < 0) msg << "snapshot_stride must be >= 0; ";
  if (filter.kind == FilterKind::exponential && (filter.order < 2 || !(filter.strength > 0.0))) {
    msg << "exponential filter needs order >= 2 and strength > 0; ";
  }
  if (!msg.str().empty()) throw ContractViolation("SolverConfig: " + msg.str());
}

namespace {

Tendency evaluate_rhs(const SpectralField& theta, const SpectralField& omega) {
  const SpectralVector u = velocity_from_vorticity(omega);
  Tendency out{-advect(u, theta), spectral_derivative(theta, 1) - advect(u, omega)};
  // Transport of a zero-mean quantity by a solenoidal field has no mean part.
  out.dtheta.coeffs()(0, 0) = 0.0;
  out.domega.coeffs()(0, 0) = 0.0;
  return out;
}

void apply_filter(SpectralField& f, const SpectralFilter& filter) {
  if (filter.kind == FilterKind::none) return;
  const Grid& grid = f.grid();
  const double kc = grid.dealias_cutoff();
  const auto sigma = [&](int k) {
    return std::exp(-filter.strength * std::pow(std::abs(k) / kc, filter.order));
  };
  for (int r = 0; r < grid.n(); ++r) {
    const double s1 = sigma(grid.k1(r));
    for (int c = 0; c < grid.spectral_cols(); ++c) f.coeffs()(r, c) *= s1 * sigma(c);
  }
}

bool all_finite(const SpectralField& f) { return f.coeffs().allFinite(); }

}  // namespace

Tendency rhs(const SolverState& state) { return evaluate_rhs(state.theta(), state.omega()); }

double admissible_dt(const SolverState& state, double cfl) {
  const double umax = lebesgue_norm(state.velocity(), INFINITY);
  if (umax == 0.0) return INFINITY;
  return cfl * state.grid().spacing() / umax;
}

SolverState time_step(const SolverState& state, double dt, const StepOptions& options) {
  if (!(dt > 0.0)) throw ContractViolation("time_step: dt must be positive");
  if (!options.force) {
    const double limit = admissible_dt(state, options.cfl);
    if (dt > limit) {
      std::ostringstream msg;
      msg << "time_step: dt = " << dt << " violates CFL; admissible dt = " << limit;
      throw CflViolation(msg.str(), limit);
    }
  }
  const SpectralField& th0 = state.theta();
  const SpectralField& w0 = state.omega();

  const auto non_finite = [&] {
    std::ostringstream msg;
    msg << "time_step: non-finite state after step from t = " << state.t();
    return NonFiniteState(msg.str());
  };

  try {
    const Tendency k1 = evaluate_rhs(th0, w0);
    const Tendency k2 = evaluate_rhs(th0 + (0.5 * dt) * k1.dtheta, w0 + (0.5 * dt) * k1.domega);
    const Tendency k3 = evaluate_rhs(th0 + (0.5 * dt) * k2.dtheta, w0 + (0.5 * dt) * k2.domega);
    const Tendency k4 = evaluate_rhs(th0 + dt * k3.dtheta, w0 + dt * k3.domega);

    SpectralField theta =
        th0 + (dt / 6.0) * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
    SpectralField omega =
        w0 + (dt / 6.0) * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega);
    apply_filter(theta, options.filter);
    apply_filter(omega, options.filter);
    if (!all_finite(theta) || !all_finite(omega)) throw non_finite();
    return SolverState(state.t() + dt, std::move(theta), std::move(omega));
  } catch (const NonFiniteSample&) {
    throw non_finite();
  }
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::stop_time: return "stop_time";
    case StopReason::tail_fraction: return "tail_fraction";
    case StopReason::omega_growth: return "omega_growth";
    case StopReason::non_finite: return "non_finite";
  }
  return "unknown";
}

Trajectory simulate(const SolverState& initial, const SolverConfig& config,
                    const StepObserver& observer) {
  config.validate();
  require_same_grid(initial.grid(), config.grid, "simulate");
  Trajectory traj;
  traj.filter = config.filter;
  SolverState state = initial;
  traj.records.push_back(record(state, config.r));
  if (config.snapshot_stride > 0) traj.snapshots.push_back({0, state});
  if (observer) observer(0, state, traj.records.back());
  const double omega0 = traj.records.front().Omega;
  const double end = initial.t() + config.stop_time;
  const StepOptions options{config.cfl, config.filter, true};

  int step = 0;
  while (end - state.t() > 1e-12 * std::max(1.0, end)) {
    const double dt =
        std::min({config.dt_max, admissible_dt(state, config.cfl), end - state.t()});
    try {
      state = time_step(state, dt, options);
    } catch (const NonFiniteState&) {
      traj.reason = StopReason::non_finite;
      break;
    }
    ++step;
    DiagnosticsRecord rec = record(state, config.r);
    accumulate_integrals(traj.records.back(), rec);
    traj.records.push_back(rec);
    if (config.snapshot_stride > 0 && step % config.snapshot_stride == 0) {
      traj.snapshots.push_back({step, state});
    }
    if (observer) observer(step, state, rec);
    if (std::max(rec.omega_tail, rec.theta_tail) > config.thresholds.tail_fraction) {
      traj.reason = StopReason::tail_fraction;
      break;
    }
    if (omega0 > 0.0 && rec.Omega >= config.thresholds.omega_growth * omega0) {
      traj.reason = StopReason::omega_growth;
      break;
    }
  }
  traj.steps = step;
  traj.stop_t = state.t();
  traj.final_state = state;
  return traj;
}

SolverState apply_scaling(const SolverState& state, double eps) {
  if (!(eps > 0.0) || std::isinf(eps)) {
    std::ostringstream msg;
    msg << "apply_scaling: eps must be positive (got " << eps << ")";
    throw PreconditionError(msg.str());
  }
  return SolverState(state.t() / eps, (eps * eps) * state.theta(), eps * state.omega());
}

SpectralField pressure_source(const SolverState& state) {
  const SpectralVector u = state.velocity();
  const RealField a = to_physical(spectral_derivative(u[0], 1));  // d1 u1
  const RealField b = to_physical(spectral_derivative(u[0], 2));  // d2 u1
  const RealField c = to_physical(spectral_derivative(u[1], 1));  // d1 u2
  const RealField d = to_physical(spectral_derivative(u[1], 2));  // d2 u2
  RealArray quad = a.samples().square() + 2.0 * b.samples() * c.samples() + d.samples().square();
  SpectralField source = spectral_derivative(state.theta(), 2) -
                         dealias(to_spectral(RealField(state.grid(), std::move(quad))));
  // The quadratic term is a double divergence; its mean is zero up to rounding.
  source.coeffs()(0, 0) = 0.0;
  return source;
}

RealField recover_pressure(const SolverState& state) {
  return to_physical(invert_laplacian(pressure_source(state)));
}

}  // namespace bsq
