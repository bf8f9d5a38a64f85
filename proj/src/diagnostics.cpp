#include "bsq/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace bsq {

namespace {

constexpr BesovIndex kB0 = {0.0, INFINITY, 1.0};
// Relative slack for comparisons that hold with equality at t = 0.
constexpr double kRoundoffSlack = 1e-12;

void require_positive(double value, const char* name, const char* where) {
  if (!(value > 0.0) || std::isinf(value)) {
    std::ostringstream msg;
    msg << where << ": " << name << " must be positive and finite (got " << value << ")";
    throw PreconditionError(msg.str());
  }
}

void require_nonempty(std::span<const DiagnosticsRecord> records, const char* where) {
  if (records.empty()) throw ContractViolation(std::string(where) + ": empty trajectory");
}

// Cumulative trapezoidal integral of a record quantity.
template <typename Getter>
std::vector<double> running_integral(std::span<const DiagnosticsRecord> records, Getter get) {
  std::vector<double> out(records.size(), 0.0);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double dt = records[i].t - records[i - 1].t;
    out[i] = out[i - 1] + 0.5 * dt * (get(records[i - 1]) + get(records[i]));
  }
  return out;
}

}  // namespace

double spectral_tail_fraction(const SpectralField& f, double cutoff) {
  const Grid& grid = f.grid();
  const int last = grid.spectral_cols() - 1;
  double tail = 0.0;
  double total = 0.0;
  for (int r = 0; r < grid.n(); ++r) {
    const double k1 = grid.k1(r);
    for (int c = 0; c <= last; ++c) {
      if (r == 0 && c == 0) continue;
      const double w = (c == 0 || c == last) ? 1.0 : 2.0;
      const double e = w * std::norm(f.coeffs()(r, c));
      total += e;
      if (std::hypot(k1, static_cast<double>(c)) > cutoff) tail += e;
    }
  }
  return total > 0.0 ? tail / total : 0.0;
}

DiagnosticsRecord record(const SolverState& state, double r) {
  if (!(r > 1.0) || std::isinf(r)) {
    std::ostringstream msg;
    msg << "record: r must lie in (1, inf) (got " << r << ")";
    throw PreconditionError(msg.str());
  }
  const SpectralField& omega = state.omega();
  const SpectralField& theta = state.theta();
  const SpectralVector u = velocity_from_vorticity(omega);
  const SpectralVector grad_theta = gradient(theta);
  const RealField theta_phys = to_physical(theta);

  DiagnosticsRecord rec;
  rec.t = state.t();
  rec.r = r;
  rec.omega_b0 = besov_norm(omega, kB0);
  rec.Omega = rec.omega_b0 + lebesgue_norm(omega, r);
  rec.d1theta_b0 = besov_norm(grad_theta[0], kB0);
  rec.grad_theta_b0 = std::max(rec.d1theta_b0, besov_norm(grad_theta[1], kB0));
  rec.Theta = rec.grad_theta_b0 + lebesgue_norm(grad_theta, r);
  rec.grad_u_inf = velocity_gradient_norm(u, INFINITY);
  rec.omega_inf = lebesgue_norm(omega, INFINITY);
  rec.grad_theta_inf = lebesgue_norm(grad_theta, INFINITY);
  // d2 u2 = -d1 u1, so three Jacobian entries carry every distinct block norm.
  rec.grad_u_b0 = std::max({besov_norm(spectral_derivative(u[0], 1), kB0),
                            besov_norm(spectral_derivative(u[0], 2), kB0),
                            besov_norm(spectral_derivative(u[1], 1), kB0)});

  rec.theta_l2 = std::sqrt(coefficient_energy(theta));
  rec.theta_mean = theta.mean();
  rec.theta_min = theta_phys.samples().minCoeff();
  rec.theta_max = theta_phys.samples().maxCoeff();
  rec.omega_mean = omega.mean();
  rec.energy = 0.5 * (coefficient_energy(u[0]) + coefficient_energy(u[1]));
  rec.buoyancy_work = inner_product(theta, u[1]);
  const double tail_cutoff = 0.5 * state.grid().dealias_cutoff();
  rec.omega_tail = spectral_tail_fraction(omega, tail_cutoff);
  rec.theta_tail = spectral_tail_fraction(theta, tail_cutoff);
  return rec;
}

void accumulate_integrals(const DiagnosticsRecord& prev, DiagnosticsRecord& next) {
  const double half_dt = 0.5 * (next.t - prev.t);
  next.I1 = prev.I1 + half_dt * (prev.grad_u_inf + next.grad_u_inf);
  next.I2 = prev.I2 + half_dt * (prev.omega_inf + prev.grad_theta_inf + next.omega_inf +
                                 next.grad_theta_inf);
  next.I3 = prev.I3 + half_dt * (prev.grad_theta_inf + next.grad_theta_inf);
}

void write_diag_header(std::ostream& out) {
  out << "t,Omega,Theta,grad_u_inf,omega_inf,grad_theta_inf,I1,I2,I3\n";
}

void write_diag_row(std::ostream& out, const DiagnosticsRecord& rec) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(17) << rec.t << ',' << rec.Omega << ',' << rec.Theta << ','
      << rec.grad_u_inf << ',' << rec.omega_inf << ',' << rec.grad_theta_inf << ',' << rec.I1
      << ',' << rec.I2 << ',' << rec.I3 << '\n';
  out.flags(flags);
  out.precision(precision);
}

namespace {

LifespanBound evaluate_bound(double a, double ratio_arg, double C) {
  LifespanBound b;
  b.C = C;
  b.bound = std::log1p(0.5 * std::log1p(ratio_arg)) / (C * a);
  return b;
}

}  // namespace

LifespanBound lifespan_lower_bound_2d(double Omega0, double Theta0, double C) {
  require_positive(Omega0, "Omega0", "lifespan_lower_bound_2d");
  require_positive(Theta0, "Theta0", "lifespan_lower_bound_2d");
  require_positive(C, "C", "lifespan_lower_bound_2d");
  LifespanBound b = evaluate_bound(Omega0, C * Omega0 * Omega0 / Theta0, C);
  b.Omega0 = Omega0;
  b.Theta0 = Theta0;
  b.X = 2.0 * C * b.bound * Omega0;
  b.Y = 2.0 * C * Omega0 * Omega0 / Theta0;
  return b;
}

LifespanBound lifespan_lower_bound_swirl(double omega_theta_norm, double u_theta_sq_norm,
                                         double C) {
  require_positive(omega_theta_norm, "omega_theta_norm", "lifespan_lower_bound_swirl");
  require_positive(u_theta_sq_norm, "u_theta_sq_norm", "lifespan_lower_bound_swirl");
  require_positive(C, "C", "lifespan_lower_bound_swirl");
  LifespanBound b = evaluate_bound(omega_theta_norm, C * omega_theta_norm / u_theta_sq_norm, C);
  b.Omega0 = omega_theta_norm;
  b.Theta0 = u_theta_sq_norm;
  b.X = 2.0 * C * b.bound * omega_theta_norm;
  b.Y = 2.0 * C * omega_theta_norm / u_theta_sq_norm;
  return b;
}

nlohmann::json to_json(const CheckReport& report) {
  nlohmann::json j{{"check", report.check},
                   {"C", report.C},
                   {"holds", report.holds},
                   {"margin", report.margin},
                   {"horizon", report.horizon}};
  j["first_violation_t"] =
      report.first_violation_t ? nlohmann::json(*report.first_violation_t) : nlohmann::json();
  return j;
}

CheckReport bootstrap_check(std::span<const DiagnosticsRecord> records, double C) {
  require_nonempty(records, "bootstrap_check");
  const double omega0 = records.front().Omega;
  const double theta0 = records.front().Theta;
  const auto omega_integral = running_integral(records, [](const auto& r) { return r.Omega; });

  CheckReport report;
  report.check = "bootstrap_envelope";
  report.C = C;
  report.margin = std::numeric_limits<double>::infinity();
  std::size_t last = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double lhs = (records[i].t - records.front().t) * theta0 * std::exp(C * omega_integral[i]);
    if (lhs > omega0) break;
    last = i;
  }
  report.horizon = records[last].t - records.front().t;
  for (std::size_t i = 0; i <= last; ++i) {
    const double t = records[i].t - records.front().t;
    const double envelope = 2.0 * omega0 * std::exp(2.0 * C * t * omega0);
    const double gap = envelope - records[i].Omega;
    report.margin = std::min(report.margin, gap);
    if (gap < 0.0 && !report.first_violation_t) report.first_violation_t = t;
  }
  report.holds = !report.first_violation_t.has_value();
  return report;
}

namespace {

// Smallest C >= 0 with holds(C); +inf if none up to a large cap. `holds` must
// be monotone in C.
template <typename Pred>
double minimal_constant(Pred holds) {
  if (holds(0.0)) return 0.0;
  double hi = 1.0;
  while (!holds(hi)) {
    hi *= 2.0;
    if (hi > 1e12) return std::numeric_limits<double>::infinity();
  }
  double lo = 0.0;
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? hi : lo) = mid;
  }
  return hi;
}

struct Evaluation {
  bool holds = true;
  double margin = std::numeric_limits<double>::infinity();
  std::optional<double> first_violation_t;
};

template <typename Rhs, typename Lhs>
Evaluation evaluate(std::span<const DiagnosticsRecord> records, Lhs lhs, Rhs rhs) {
  Evaluation e;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double right = rhs(i);
    const double gap = right - lhs(i);
    e.margin = std::min(e.margin, gap);
    if (gap < -kRoundoffSlack * std::abs(right) && !e.first_violation_t) {
      e.first_violation_t = records[i].t;
      e.holds = false;
    }
  }
  return e;
}

}  // namespace

TransportReport transport_bound_check(std::span<const DiagnosticsRecord> records, double C) {
  require_nonempty(records, "transport_bound_check");
  const auto forcing = running_integral(records, [](const auto& r) { return r.d1theta_b0; });
  const auto lipschitz = running_integral(records, [](const auto& r) { return r.grad_u_inf; });
  const auto besov_grad = running_integral(records, [](const auto& r) { return r.grad_u_b0; });
  const double omega0 = records.front().omega_b0;
  const double gtheta0 = records.front().grad_theta_b0;

  const auto vort_eval = [&](double c) {
    return evaluate(
        records, [&](std::size_t i) { return records[i].omega_b0; },
        [&](std::size_t i) { return (omega0 + forcing[i]) * (1.0 + c * lipschitz[i]); });
  };
  const auto temp_eval = [&](double c) {
    return evaluate(
        records, [&](std::size_t i) { return records[i].grad_theta_b0; },
        [&](std::size_t i) { return gtheta0 * std::exp(c * besov_grad[i]); });
  };

  const auto to_report = [&](const char* name, const Evaluation& e) {
    CheckReport r;
    r.check = name;
    r.C = C;
    r.holds = e.holds;
    r.margin = e.margin;
    r.first_violation_t = e.first_violation_t;
    r.horizon = records.back().t;
    return r;
  };

  TransportReport report;
  report.vorticity = to_report("transport_vorticity_b0", vort_eval(C));
  report.temperature = to_report("transport_grad_theta_b0", temp_eval(C));
  report.min_C_vorticity = minimal_constant([&](double c) { return vort_eval(c).holds; });
  report.min_C_temperature = minimal_constant([&](double c) { return temp_eval(c).holds; });
  return report;
}

nlohmann::json to_json(const TransportReport& report) {
  return {{"vorticity", to_json(report.vorticity)},
          {"temperature", to_json(report.temperature)},
          {"min_C_vorticity", report.min_C_vorticity},
          {"min_C_temperature", report.min_C_temperature},
          {"calibrated_C", report.calibrated_C()},
          {"C_is_empirical", true}};
}

InterpolationReport log_interpolation_check(std::span<const SpectralField> vorticities, double r,
                                            const BesovIndex& idx) {
  idx.validate();
  if (!(idx.s > 1.0 + 2.0 / idx.p)) {
    std::ostringstream msg;
    msg << "log_interpolation_check: need s > 1 + 2/p (got s=" << idx.s << ", p=" << idx.p << ")";
    throw PreconditionError(msg.str());
  }
  InterpolationReport report;
  for (const auto& omega : vorticities) {
    const double sup = lebesgue_norm(omega, INFINITY);
    if (sup == 0.0) {
      ++report.skipped;
      continue;
    }
    const double lebesgue = lebesgue_norm(omega, r) + sup;
    const double besov = besov_norm(omega, {idx.s - 1.0, idx.p, idx.q});
    const double lip = velocity_gradient_norm(velocity_from_vorticity(omega), INFINITY);
    const double ratio = lip / (lebesgue * std::log(std::numbers::e + besov));
    report.ratios.push_back(ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
    ++report.evaluated;
  }
  return report;
}

double calderon_zygmund_ratio(const SpectralField& omega, double p) {
  const double denom = lebesgue_norm(omega, p);
  if (!(denom > 0.0)) throw PreconditionError("calderon_zygmund_ratio: zero vorticity");
  return velocity_gradient_norm(velocity_from_vorticity(omega), p) / denom;
}

}  // namespace bsq
