#include <cmath>
#include <functional>
#include <stdexcept>

#include "bsq/bony.hpp"
#include "bsq/experiment.hpp"
#include "bsq/random_fields.hpp"

namespace bsq {

namespace {

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

Check at_most(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, value <= threshold};
}

SpectralField seeded(const Grid& grid, std::uint64_t seed, int K = 12) {
  RandomFieldSpec spec;
  spec.seed = seed;
  spec.max_wavenumber = K;
  return random_field(grid, spec);
}

std::vector<Check> lp_suite() {
  std::vector<Check> out;
  const CutoffProfile cut = build_cutoff();
  double pou = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double r = 0.01 * i;
    double total = cut.chi(r);
    for (int j = 0; j < 8; ++j) total += cut.phi(r / std::ldexp(1.0, j));
    pou = std::max(pou, std::abs(total - 1.0));
  }
  out.push_back(at_most("partition_of_unity", pou, 1e-15));

  const Grid grid(64);
  double recon = 0.0;
  double bern2 = 0.0;
  double bern_inf = 0.0;
  double overlap = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SpectralField f = seeded(grid, seed, grid.dealias_cutoff());
    const DyadicDecomposition d = decompose(f);
    recon = std::max(recon, relative_l2_residual(d.sum(), f));
    for (int j = 0; j <= d.j_max; ++j) {
      const SpectralField& b = d.block(j);
      const double scale = std::ldexp(1.0, j);
      const double n2 = lebesgue_norm(b, 2.0);
      const double ninf = lebesgue_norm(b, INFINITY);
      if (n2 > 1e-14) bern2 = std::max(bern2, lebesgue_norm(gradient(b), 2.0) / (scale * n2));
      if (ninf > 1e-14) {
        bern_inf = std::max(bern_inf, lebesgue_norm(gradient(b), INFINITY) / (scale * ninf));
      }
      if (j + 2 <= d.j_max) {
        overlap = std::max(overlap, lebesgue_norm(dyadic_block(b, j + 2), 2.0) /
                                        std::max(lebesgue_norm(f, 2.0), 1e-300));
      }
    }
  }
  out.push_back(at_most("reconstruction_relative_l2", recon, 1e-12));
  out.push_back(at_most("bernstein_constant_l2", bern2, 4.0));
  out.push_back(at_most("bernstein_constant_linf", bern_inf, 4.0));
  out.push_back(at_most("block_almost_orthogonality", overlap, 1e-14));
  return out;
}

std::vector<Check> bony_suite() {
  std::vector<Check> out;
  const Grid grid(64);
  double bony = 0.0;
  double six = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SpectralField f = seeded(grid, 2 * seed + 1, grid.dealias_cutoff());
    const SpectralField g = seeded(grid, 2 * seed + 2, grid.dealias_cutoff());
    bony = std::max(bony, relative_l2_residual(bony_split(f, g).sum(), dealiased_product(f, g)));
    RandomFieldSpec spec;
    spec.seed = 100 + seed;
    spec.max_wavenumber = grid.dealias_cutoff();
    const SpectralVector u = random_solenoidal(grid, spec);
    const SpectralField w = seeded(grid, 200 + seed, grid.dealias_cutoff());
    for (int j = 1; j <= 5; ++j) {
      six = std::max(six, relative_l2_residual(six_term_decomposition(u, j, w).sum(),
                                               commutator(u, j, w)));
    }
  }
  out.push_back(at_most("bony_identity_relative_l2", bony, 1e-11));
  out.push_back(at_most("six_term_relative_l2", six, 1e-10));

  // A constant velocity commutes with every block.
  SpectralVector u{SpectralField::zeros(grid), SpectralField::zeros(grid)};
  u[0].coeffs()(0, 0) = 0.7;
  u[1].coeffs()(0, 0) = -0.3;
  const SpectralField w = seeded(grid, 7);
  double constant = 0.0;
  for (int j = -1; j <= 5; ++j) constant = std::max(constant, lebesgue_norm(commutator(u, j, w), 2.0));
  out.push_back(at_most("constant_velocity_commutator", constant, 1e-13));
  return out;
}

double l2_distance(const SpectralField& a, const SpectralField& b) { return lebesgue_norm(a - b, 2.0); }

std::vector<Check> solver_suite() {
  std::vector<Check> out;
  RunConfig cfg;
  cfg.solver.grid = Grid(64);
  cfg.solver.stop_time = 1.0;
  for (const Preset preset : {Preset::stratified, Preset::shear}) {
    cfg.preset = preset;
    const SolverState s0 = initial_state(cfg);
    const Trajectory traj = simulate(s0, cfg.solver);
    const double drift = std::max(l2_distance(traj.final_state->theta(), s0.theta()),
                                  l2_distance(traj.final_state->omega(), s0.omega()));
    out.push_back(at_most("steady_" + to_string(preset) + "_l2_drift", drift, 1e-8));
  }

  cfg.preset = Preset::random_seeded;
  cfg.seed = 3;
  cfg.solver.stop_time = 0.5;
  const Trajectory traj = simulate(initial_state(cfg), cfg.solver);
  const RunSummary summary = summarize(traj);
  out.push_back(at_most("theta_l2_relative_drift", summary.theta_l2_drift, 1e-6));
  out.push_back(at_most("theta_mean_drift", summary.theta_mean_drift, 1e-12));
  out.push_back(at_most("omega_mean_drift", summary.omega_mean_drift, 1e-12));

  // (t, theta, w) -> (t / eps, eps^2 theta, eps w) maps solutions to solutions.
  const double eps = 0.5;
  const SolverState a0 = initial_state(cfg);
  const SolverState b0 = apply_scaling(a0, eps);
  const double T = 0.25;
  const double dt = 0.2 * admissible_dt(a0, 0.4);
  const int steps = static_cast<int>(std::ceil(T / dt));
  SolverState a = a0;
  SolverState b = b0;
  const StepOptions forced{0.4, {}, true};
  for (int i = 0; i < steps; ++i) {
    a = time_step(a, T / steps, forced);
    b = time_step(b, T / steps / eps, forced);
  }
  const SolverState mapped = apply_scaling(a, eps);
  const double scaling = std::max(relative_l2_residual(b.theta(), mapped.theta()),
                                  relative_l2_residual(b.omega(), mapped.omega()));
  out.push_back(at_most("scaling_symmetry_relative_l2", scaling, 1e-6));
  return out;
}

std::vector<Check> diagnostics_suite() {
  std::vector<Check> out;
  const double anchor = lifespan_lower_bound_2d(1.0, 1.0, 1.0).bound;
  out.push_back(at_most("lifespan_anchor_abs_error", std::abs(anchor - std::log1p(0.5 * std::log(2.0))),
                        1e-12));
  double scaling = 0.0;
  for (int i = 1; i <= 20; ++i) {
    const double lambda = 0.1 * i;
    const double a = lifespan_lower_bound_2d(1.3, 0.4, 0.8).bound;
    const double b = lambda * lifespan_lower_bound_2d(lambda * 1.3, lambda * lambda * 0.4, 0.8).bound;
    scaling = std::max(scaling, std::abs(a - b) / a);
  }
  out.push_back(at_most("lifespan_lambda_scaling", scaling, 1e-12));

  const Grid grid(64);
  double cz = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    cz = std::max(cz, std::abs(calderon_zygmund_ratio(seeded(grid, seed), 2.0) - 1.0));
  }
  out.push_back(at_most("calderon_zygmund_l2_isometry", cz, 1e-12));

  RunConfig cfg;
  cfg.solver.grid = grid;
  cfg.solver.stop_time = 0.5;
  cfg.eps_theta = 0.01;
  const Trajectory traj = simulate(initial_state(cfg), cfg.solver);
  const TransportReport transport = transport_bound_check(traj.records, 0.0);
  const double C = transport.calibrated_C();
  out.push_back({"transport_calibration_finite", C, 0.0, std::isfinite(C)});
  const CheckReport boot = bootstrap_check(traj.records, C);
  out.push_back({"bootstrap_envelope_margin", boot.margin, 0.0, boot.holds && boot.margin > 0.0});
  return out;
}

nlohmann::json run_suite(const std::string& name, const std::vector<Check>& checks, bool& passed) {
  nlohmann::json results = nlohmann::json::array();
  bool ok = true;
  for (const auto& c : checks) {
    results.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}});
    ok = ok && c.passed;
  }
  passed = passed && ok;
  return {{"suite", name}, {"results", results}, {"passed", ok}};
}

}  // namespace

VerifyOutcome cmd_verify(const std::string& suite) {
  static const std::vector<std::pair<std::string, std::function<std::vector<Check>()>>> suites{
      {"lp", lp_suite}, {"bony", bony_suite}, {"solver", solver_suite}, {"diagnostics", diagnostics_suite}};
  VerifyOutcome outcome;
  nlohmann::json reports = nlohmann::json::array();
  bool known = suite == "all";
  for (const auto& [name, run] : suites) {
    if (suite == "all" || suite == name) {
      known = true;
      reports.push_back(run_suite(name, run(), outcome.passed));
    }
  }
  if (!known) {
    throw std::invalid_argument("unknown suite `" + suite + "` (lp, bony, solver, diagnostics, all)");
  }
  outcome.report = suite == "all" ? nlohmann::json{{"suite", "all"}, {"suites", reports}, {"passed", outcome.passed}}
                                  : reports.front();
  return outcome;
}

}  // namespace bsq
