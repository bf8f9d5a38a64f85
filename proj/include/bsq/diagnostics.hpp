#pragma once

// Norm tracking along trajectories, continuation integrals, the transport and
// bootstrap envelope checks, and closed-form lifespan lower bounds.
//
// Every constant C appearing here is empirical: it is either supplied by the
// caller or returned as the smallest value that makes an inequality hold on
// the recorded data.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsq/littlewood_paley.hpp"
#include "bsq/state.hpp"

namespace bsq {

struct DiagnosticsRecord {
  double t = 0.0;
  double r = 2.0;
  double Omega = 0.0;           ///< ||w||_{B^0_{inf,1}} + ||w||_{L^r}
  double Theta = 0.0;           ///< same norm of grad theta
  double grad_u_inf = 0.0;
  double omega_inf = 0.0;
  double grad_theta_inf = 0.0;
  double I1 = 0.0;              ///< int ||grad u||_inf
  double I2 = 0.0;              ///< int (||w||_inf + ||grad theta||_inf)
  double I3 = 0.0;              ///< int ||grad theta||_inf

  // Integrands of the transport inequalities.
  double omega_b0 = 0.0;        ///< ||w||_{B^0_{inf,1}}
  double d1theta_b0 = 0.0;      ///< ||d1 theta||_{B^0_{inf,1}}
  double grad_u_b0 = 0.0;       ///< max_ij ||d_i u_j||_{B^0_{inf,1}}
  double grad_theta_b0 = 0.0;   ///< max_i ||d_i theta||_{B^0_{inf,1}}

  // Conservation bookkeeping.
  double theta_l2 = 0.0;
  double theta_mean = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double omega_mean = 0.0;
  double energy = 0.0;          ///< (1/2) ||u||_{L^2}^2
  double buoyancy_work = 0.0;   ///< normalized int theta u2
  double omega_tail = 0.0;
  double theta_tail = 0.0;
};

/// Snapshot diagnostics with zero running integrals. Requires r in (1, inf).
DiagnosticsRecord record(const SolverState& state, double r);

/// Advances the running integrals from `prev` to `next` by the trapezoidal rule.
void accumulate_integrals(const DiagnosticsRecord& prev, DiagnosticsRecord& next);

/// Fraction of the nonzero-mode energy carried by radial wavenumbers > cutoff.
double spectral_tail_fraction(const SpectralField& f, double cutoff);

/// CSV columns: t,Omega,Theta,grad_u_inf,omega_inf,grad_theta_inf,I1,I2,I3.
void write_diag_header(std::ostream& out);
void write_diag_row(std::ostream& out, const DiagnosticsRecord& rec);

struct LifespanBound {
  double C = 0.0;
  double Omega0 = 0.0;
  double Theta0 = 0.0;
  double bound = 0.0;
  double X = 0.0;  ///< 2 C T Omega0 at T = bound
  double Y = 0.0;  ///< 2 C Omega0^2 / Theta0
};

/// T* >= log(1 + log(1 + C Omega0^2 / Theta0) / 2) / (C Omega0). All inputs > 0.
LifespanBound lifespan_lower_bound_2d(double Omega0, double Theta0, double C);

/// Axisymmetric swirl bound
/// T* >= log(1 + log(1 + C a / b) / 2) / (C a), a = ||w0^theta||_{B^0_{inf,1}},
/// b = ||(u0^theta)^2||_{B^1_{inf,1}}. Pure scalar evaluator.
LifespanBound lifespan_lower_bound_swirl(double omega_theta_norm, double u_theta_sq_norm,
                                         double C);

struct CheckReport {
  std::string check;
  double C = 0.0;
  bool holds = true;
  double margin = 0.0;
  std::optional<double> first_violation_t;
  double horizon = 0.0;  ///< window the check covered (T_b for the bootstrap check)
};

nlohmann::json to_json(const CheckReport& report);

/// Finds the largest recorded T_b with T_b Theta0 exp(C int_0^T_b Omega) <= Omega0
/// and tests Omega(t) <= 2 Omega0 exp(2 C t Omega0) for t <= T_b.
CheckReport bootstrap_check(std::span<const DiagnosticsRecord> records, double C);

struct TransportReport {
  CheckReport vorticity;       ///< null-regularity bound for ||w||_{B^0_{inf,1}}
  CheckReport temperature;     ///< exponential bound for ||grad theta||_{B^0_{inf,1}}
  double min_C_vorticity = 0.0;
  double min_C_temperature = 0.0;

  /// Smallest C making both inequalities hold on the whole trajectory.
  double calibrated_C() const { return std::max(min_C_vorticity, min_C_temperature); }
};

/// Evaluates both transport inequalities with `C` and bisects (1e-3 relative)
/// for the minimal C of each. Minimal values are +inf when no C works.
TransportReport transport_bound_check(std::span<const DiagnosticsRecord> records, double C);

nlohmann::json to_json(const TransportReport& report);

struct InterpolationReport {
  double max_ratio = 0.0;
  int evaluated = 0;
  int skipped = 0;
  std::vector<double> ratios;
};

/// ||grad u||_inf / ((||w||_{L^r} + ||w||_inf) log(e + ||w||_{B^{s-1}_{p,q}})) over an
/// ensemble of vorticities; zero fields are skipped. Requires s > 1 + 2/p.
InterpolationReport log_interpolation_check(std::span<const SpectralField> vorticities, double r,
                                            const BesovIndex& idx = {2.5, 2.0, 2.0});

/// ||grad u||_{L^p} / ||w||_{L^p} for the Biot-Savart velocity of w.
double calderon_zygmund_ratio(const SpectralField& omega, double p);

}  // namespace bsq
