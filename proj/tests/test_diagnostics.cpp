#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "bsq/diagnostics.hpp"
#include "bsq/random_fields.hpp"
#include "bsq/solver.hpp"

using namespace bsq;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

SpectralField mode(const Grid& g, double (*f)(double, double)) {
  return to_spectral(RealField::sample(g, f));
}

DiagnosticsRecord synthetic(double t, double Omega, double Theta) {
  DiagnosticsRecord r;
  r.t = t;
  r.Omega = Omega;
  r.Theta = Theta;
  return r;
}

}  // namespace

TEST_CASE("record of the zero state") {
  const Grid g(32);
  const DiagnosticsRecord r = record(SolverState(0.0, SpectralField::zeros(g), SpectralField::zeros(g)), 2.0);
  CHECK(r.Omega == 0.0);
  CHECK(r.Theta == 0.0);
  CHECK(r.grad_u_inf == 0.0);
  CHECK(r.omega_inf == 0.0);
  CHECK(r.grad_theta_inf == 0.0);
  CHECK(r.energy == 0.0);
  CHECK(r.omega_tail == 0.0);
  CHECK_THROWS_AS(record(SolverState(0.0, SpectralField::zeros(g), SpectralField::zeros(g)), 1.0),
                  PreconditionError);
}

TEST_CASE("record of shear and stratified states") {
  const Grid g(64);
  const SpectralField w = mode(g, [](double, double y) { return std::cos(y); });
  const DiagnosticsRecord shear = record(SolverState(0.0, SpectralField::zeros(g), w), 2.0);
  CHECK(shear.Theta == 0.0);
  CHECK(shear.Omega == doctest::Approx(besov_lr_norm(w, 2.0)).epsilon(1e-15));
  CHECK(shear.energy == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(shear.grad_u_inf == doctest::Approx(1.0).epsilon(1e-14));

  const DiagnosticsRecord strat =
      record(SolverState(0.0, mode(g, [](double, double y) { return std::sin(y); }), SpectralField::zeros(g)), 2.0);
  CHECK(strat.Omega == 0.0);
  CHECK(std::abs(strat.grad_theta_inf - 1.0) <= 1e-3);
  CHECK(strat.theta_l2 == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(strat.d1theta_b0 == 0.0);
}

TEST_CASE("tail fraction") {
  const Grid g(64);
  CHECK(spectral_tail_fraction(SpectralField::zeros(g), 10.0) == 0.0);
  // Equal energy at |k| = 2 and |k| = 16.
  const SpectralField f = mode(g, [](double x, double y) { return std::cos(2.0 * x) + std::sin(16.0 * y); });
  CHECK(spectral_tail_fraction(f, 10.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(spectral_tail_fraction(f, 20.0) < 1e-28);
}

TEST_CASE("lifespan bound anchor against a 50-digit evaluation") {
  const Big expected = boost::multiprecision::log1p(Big(0.5) * boost::multiprecision::log(Big(2)));
  const double got = lifespan_lower_bound_2d(1.0, 1.0, 1.0).bound;
  CHECK(static_cast<double>(abs(Big(got) - expected) / expected) <= 1e-12);
  CHECK(got == doctest::Approx(0.2975632847875861).epsilon(1e-14));
  const LifespanBound b = lifespan_lower_bound_2d(1.0, 1.0, 1.0);
  CHECK(b.X == doctest::Approx(2.0 * got));
  CHECK(b.Y == doctest::Approx(2.0));

  const double swirl = lifespan_lower_bound_swirl(1.0, 1.0, 1.0).bound;
  CHECK(static_cast<double>(abs(Big(swirl) - expected) / expected) <= 1e-12);
}

TEST_CASE("lifespan bound monotonicity and scaling") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> logu(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double O = std::exp(logu(rng));
    const double T = std::exp(logu(rng));
    const double C = std::exp(logu(rng));
    const double lambda = std::exp(logu(rng));
    const double b = lifespan_lower_bound_2d(O, T, C).bound;
    const double scaled = lambda * lifespan_lower_bound_2d(lambda * O, lambda * lambda * T, C).bound;
    CHECK(std::abs(b - scaled) <= 1e-12 * b);
    CHECK(lifespan_lower_bound_2d(O, 1.5 * T, C).bound < b);
    CHECK(lifespan_lower_bound_2d(O, T, 1.5 * C).bound < b);
  }
  double prev = INFINITY;
  for (const double T : {1e-3, 1.0, 1e3, 1e6, 1e12}) {
    const double b = lifespan_lower_bound_2d(1.0, T, 1.0).bound;
    CHECK(b < prev);
    prev = b;
  }
  CHECK(prev < 1e-11);
  prev = 0.0;
  for (const double s : {1.0, 1e-2, 1e-6, 1e-12}) {
    const double b = lifespan_lower_bound_swirl(1.0, s, 1.0).bound;
    CHECK(b > prev);
    prev = b;
  }
  CHECK_THROWS_AS(lifespan_lower_bound_2d(0.0, 1.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(lifespan_lower_bound_2d(1.0, 0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(lifespan_lower_bound_2d(1.0, 1.0, -1.0), PreconditionError);
}

TEST_CASE("bootstrap variable inequality X <= exp(e^X - 1) - 1") {
  for (int i = 0; i <= 500; ++i) {
    const double X = 0.01 * i;
    CHECK(X <= std::expm1(std::expm1(X)) * (1.0 + 1e-15));
  }
}

TEST_CASE("bootstrap check on a steady Euler run") {
  SolverConfig cfg;
  cfg.grid = Grid(64);
  cfg.stop_time = 0.5;
  const SolverState s0(0.0, SpectralField::zeros(cfg.grid), mode(cfg.grid, [](double, double y) { return std::cos(y); }));
  const Trajectory traj = simulate(s0, cfg);
  const CheckReport r = bootstrap_check(traj.records, 1.0);
  CHECK(r.holds);
  CHECK(r.margin > 0.0);
  CHECK(r.horizon == doctest::Approx(0.5));
  CHECK_THROWS_AS(bootstrap_check({}, 1.0), ContractViolation);
}

TEST_CASE("bootstrap check flags the first violation") {
  // Omega triples by t = 1 while Theta0 is tiny, so T_b covers the growth.
  std::vector<DiagnosticsRecord> recs;
  for (int i = 0; i <= 10; ++i) recs.push_back(synthetic(0.1 * i, 1.0 + 0.2 * i, 1e-3));
  const CheckReport bad = bootstrap_check(recs, 1e-9);
  CHECK_FALSE(bad.holds);
  REQUIRE(bad.first_violation_t.has_value());
  CHECK(*bad.first_violation_t == doctest::Approx(0.6));
  CHECK(bad.margin < 0.0);
  const nlohmann::json j = to_json(bad);
  CHECK(j["check"] == "bootstrap_envelope");
  CHECK(j["first_violation_t"] == doctest::Approx(0.6));

  const CheckReport good = bootstrap_check(recs, 1.0);
  CHECK(good.holds);
  CHECK(to_json(good)["first_violation_t"].is_null());
}

TEST_CASE("bootstrap horizon stops where T Theta0 exp(C int Omega) exceeds Omega0") {
  std::vector<DiagnosticsRecord> recs;
  for (int i = 0; i <= 10; ++i) recs.push_back(synthetic(0.1 * i, 1.0, 2.4));
  // T_b Theta0 <= Omega0 with C -> 0 gives T_b = 0.4.
  CHECK(bootstrap_check(recs, 1e-12).horizon == doctest::Approx(0.4));
}

TEST_CASE("transport bounds on exact steady states") {
  SolverConfig cfg;
  cfg.grid = Grid(64);
  cfg.stop_time = 0.5;
  const SolverState shear(0.0, SpectralField::zeros(cfg.grid), mode(cfg.grid, [](double, double y) { return std::cos(y); }));
  const TransportReport a = transport_bound_check(simulate(shear, cfg).records, 0.0);
  CHECK(a.vorticity.holds);
  CHECK(a.min_C_vorticity == 0.0);

  const SolverState strat(0.0, mode(cfg.grid, [](double, double y) { return std::sin(y); }), SpectralField::zeros(cfg.grid));
  const TransportReport b = transport_bound_check(simulate(strat, cfg).records, 0.0);
  CHECK(b.temperature.holds);
  CHECK(b.temperature.margin == 0.0);
  CHECK(b.min_C_temperature == 0.0);
  CHECK(b.calibrated_C() == 0.0);
  CHECK_THROWS_AS(transport_bound_check({}, 1.0), ContractViolation);
}

TEST_CASE("transport calibration on a generic small-data run") {
  SolverConfig cfg;
  cfg.grid = Grid(64);
  cfg.stop_time = 1.0;
  RandomFieldSpec spec;
  spec.seed = 31;
  spec.max_wavenumber = 4;
  const SpectralField w = random_field(cfg.grid, spec);
  spec.seed = 32;
  spec.l2_norm = 0.1;
  const Trajectory traj = simulate(SolverState(0.0, random_field(cfg.grid, spec), w), cfg);
  const TransportReport r = transport_bound_check(traj.records, 0.0);
  const double C = r.calibrated_C();
  REQUIRE(std::isfinite(C));
  const TransportReport at = transport_bound_check(traj.records, C);
  CHECK(at.vorticity.holds);
  CHECK(at.temperature.holds);
  if (C > 0.0) {
    const TransportReport below = transport_bound_check(traj.records, 0.99 * C * (1.0 - 1e-3));
    const bool both = below.vorticity.holds && below.temperature.holds;
    CHECK_FALSE(both);
  }
  const nlohmann::json j = to_json(r);
  CHECK(j["C_is_empirical"] == true);

  for (std::size_t i = 1; i < traj.records.size(); ++i) {
    CHECK(traj.records[i].I2 >= traj.records[i].I3);
    CHECK(traj.records[i].I1 >= traj.records[i - 1].I1);
  }
}

TEST_CASE("diag csv layout") {
  std::ostringstream out;
  write_diag_header(out);
  DiagnosticsRecord r = synthetic(0.5, 1.0 / 3.0, 2.0);
  write_diag_row(out, r);
  std::istringstream in(out.str());
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,Omega,Theta,grad_u_inf,omega_inf,grad_theta_inf,I1,I2,I3");
  CHECK(row.rfind("0.5,0.33333333333333331,2,", 0) == 0);
}

TEST_CASE("Calderon-Zygmund ratios") {
  const Grid g(64);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RandomFieldSpec spec;
    spec.seed = seed;
    spec.max_wavenumber = 16;
    const SpectralField w = random_field(g, spec);
    CHECK(calderon_zygmund_ratio(w, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double r4 = calderon_zygmund_ratio(w, 4.0);
    CHECK(r4 >= 0.5);
    CHECK(r4 <= 3.0);
  }
  CHECK_THROWS_AS(calderon_zygmund_ratio(SpectralField::zeros(g), 2.0), PreconditionError);
}

TEST_CASE("log interpolation check") {
  const Grid g(64);
  const std::vector<SpectralField> zero{SpectralField::zeros(g)};
  const InterpolationReport z = log_interpolation_check(zero, 2.0);
  CHECK(z.skipped == 1);
  CHECK(z.evaluated == 0);

  // Single mode cos x1: |grad u| has sup 1, ||w||_2 = 1/sqrt 2, ||w||_inf = 1,
  // and |k| = 1 splits into chi(1) in block -1 and 1 - chi(1) in block 0.
  const std::vector<SpectralField> single{mode(g, [](double x, double) { return std::cos(x); })};
  const InterpolationReport s = log_interpolation_check(single, 2.0);
  REQUIRE(s.evaluated == 1);
  const double chi1 = 1.0 / (1.0 + std::exp(-1.0));
  const double besov = std::hypot(chi1, 1.0 - chi1) / std::sqrt(2.0);
  const double expected = 1.0 / ((1.0 + 1.0 / std::sqrt(2.0)) * std::log(std::exp(1.0) + besov));
  CHECK(s.max_ratio == doctest::Approx(expected).epsilon(1e-12));
  CHECK_THROWS_AS(log_interpolation_check(single, 2.0, {1.5, 2.0, 2.0}), PreconditionError);
}
