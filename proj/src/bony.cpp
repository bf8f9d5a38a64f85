#include "bsq/bony.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bsq {

namespace {

std::vector<RealArray> physical_blocks(const SpectralField& f) {
  const DyadicDecomposition d = decompose(f);
  std::vector<RealArray> out;
  out.reserve(d.blocks.size());
  for (const auto& b : d.blocks) out.push_back(to_physical(b).samples());
  return out;
}

SpectralField from_grid_sum(const Grid& grid, RealArray values) {
  return dealias(to_spectral(RealField(grid, std::move(values))));
}

void require_solenoidal(const SpectralVector& u, const char* where) {
  require_same_grid(u[0].grid(), u[1].grid(), where);
  const double div = std::sqrt(coefficient_energy(divergence(u)));
  const double scale = std::sqrt(coefficient_energy(spectral_derivative(u[0], 1)) +
                                 coefficient_energy(spectral_derivative(u[0], 2)) +
                                 coefficient_energy(spectral_derivative(u[1], 1)) +
                                 coefficient_energy(spectral_derivative(u[1], 2)));
  if (div > 1e-10 * std::max(1.0, scale)) {
    std::ostringstream msg;
    msg << where << ": velocity is not divergence-free (||div u||_2 = " << div << ")";
    throw PreconditionError(msg.str());
  }
}

}  // namespace

SpectralField paraproduct(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "paraproduct");
  const Grid& grid = f.grid();
  const auto fb = physical_blocks(f);
  const auto gb = physical_blocks(g);
  // blocks are indexed from j = -1, so fb[i] is Delta_{i-1} f.
  RealArray low = RealArray::Zero(grid.n(), grid.n());
  RealArray acc = RealArray::Zero(grid.n(), grid.n());
  for (std::size_t i = 2; i < gb.size(); ++i) {
    low += fb[i - 2];  // S_{j-1} f with j = i - 1
    acc += low * gb[i];
  }
  return from_grid_sum(grid, std::move(acc));
}

SpectralField remainder(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "remainder");
  const Grid& grid = f.grid();
  const auto fb = physical_blocks(f);
  const auto gb = physical_blocks(g);
  RealArray acc = RealArray::Zero(grid.n(), grid.n());
  const std::size_t count = fb.size();
  for (std::size_t i = 0; i < count; ++i) {
    RealArray near = gb[i];
    if (i > 0) near += gb[i - 1];
    if (i + 1 < count) near += gb[i + 1];
    acc += fb[i] * near;
  }
  return from_grid_sum(grid, std::move(acc));
}

BonySplit bony_split(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "bony_split");
  if (!is_dealiased(f) || !is_dealiased(g)) {
    throw ContractViolation("bony_split: inputs must be dealiased");
  }
  return {paraproduct(f, g), paraproduct(g, f), remainder(f, g)};
}

SpectralField commutator(const SpectralVector& u, int j, const SpectralField& w) {
  require_same_grid(u[0].grid(), w.grid(), "commutator");
  require_solenoidal(u, "commutator");
  return advect(u, dyadic_block(w, j)) - dyadic_block(advect(u, w), j);
}

SpectralField CommutatorSplit::sum() const {
  SpectralField total = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) total += terms[i];
  return total;
}

CommutatorSplit six_term_decomposition(const SpectralVector& u, int j, const SpectralField& w) {
  require_same_grid(u[0].grid(), w.grid(), "six_term_decomposition");
  require_solenoidal(u, "six_term_decomposition");
  const Grid& grid = w.grid();
  const SpectralVector low{dyadic_block(u[0], -1), dyadic_block(u[1], -1)};
  const SpectralVector tilde{u[0] - low[0], u[1] - low[1]};
  const SpectralField wj = dyadic_block(w, j);

  CommutatorSplit split{
      {SpectralField::zeros(grid), SpectralField::zeros(grid), SpectralField::zeros(grid),
       SpectralField::zeros(grid), SpectralField::zeros(grid), SpectralField::zeros(grid)},
      tilde};
  auto& r = split.terms;
  for (int k = 0; k < 2; ++k) {
    const int axis = k + 1;
    const SpectralField dw = spectral_derivative(w, axis);
    const SpectralField dwj = spectral_derivative(wj, axis);
    r[0] += paraproduct(tilde[k], dwj) - dyadic_block(paraproduct(tilde[k], dw), j);
    r[1] += paraproduct(dwj, tilde[k]);
    r[2] -= dyadic_block(paraproduct(dw, tilde[k]), j);
    r[3] += spectral_derivative(remainder(tilde[k], wj), axis);
    r[4] -= spectral_derivative(dyadic_block(remainder(tilde[k], w), j), axis);
    r[5] += dealiased_product(low[k], dwj) - dyadic_block(dealiased_product(low[k], dw), j);
  }
  return split;
}

namespace {

void require_positive_smoothness(const BesovIndex& idx, const char* where) {
  idx.validate();
  if (!(idx.s > 0.0)) {
    std::ostringstream msg;
    msg << where << ": smoothness s must be positive (got " << idx.s << ")";
    throw PreconditionError(msg.str());
  }
}

// l^q over j of 2^{j * shift} ||[u, Delta_j] . grad f||_{L^p}, block -1 unweighted.
double weighted_commutator_norm(const SpectralVector& u, const SpectralField& f, double shift,
                                const BesovIndex& idx) {
  require_solenoidal(u, "commutator_ratio");
  const SpectralField full = advect(u, f);
  const int j_max = max_block_index(f.grid());
  std::vector<double> terms;
  for (int j = -1; j <= j_max; ++j) {
    const SpectralField c = advect(u, dyadic_block(f, j)) - dyadic_block(full, j);
    terms.push_back((j < 0 ? 1.0 : std::pow(2.0, j * shift)) * lebesgue_norm(c, idx.p));
  }
  return sequence_norm(terms, idx.q);
}

double checked_ratio(double num, double den, const char* where) {
  if (!(den > 0.0)) {
    std::ostringstream msg;
    msg << where << ": zero denominator";
    throw PreconditionError(msg.str());
  }
  return num / den;
}

}  // namespace

double commutator_ratio(const SpectralVector& u, const SpectralField& w, const BesovIndex& idx) {
  require_positive_smoothness(idx, "commutator_ratio");
  const double grad_u = velocity_gradient_norm(u, INFINITY);
  // A constant velocity commutes with every block.
  if (grad_u == 0.0) return 0.0;
  const double den = grad_u * besov_norm(w, {idx.s - 1.0, idx.p, idx.q});
  const double num = den > 0.0 ? weighted_commutator_norm(u, w, idx.s - 1.0, idx) : 0.0;
  return checked_ratio(num, den, "commutator_ratio");
}

double commutator_ratio_theta(const SpectralVector& u, const SpectralField& w,
                              const SpectralField& theta, const BesovIndex& idx) {
  require_positive_smoothness(idx, "commutator_ratio_theta");
  const double grad_u = velocity_gradient_norm(u, INFINITY);
  if (grad_u == 0.0) return 0.0;
  const double den = grad_u * besov_norm(theta, idx) +
      lebesgue_norm(gradient(theta), INFINITY) * besov_norm(w, {idx.s - 1.0, idx.p, idx.q});
  const double num = den > 0.0 ? weighted_commutator_norm(u, theta, idx.s, idx) : 0.0;
  return checked_ratio(num, den, "commutator_ratio_theta");
}

double relative_l2_residual(const SpectralField& a, const SpectralField& b) {
  const double diff = std::sqrt(coefficient_energy(a - b));
  const double ref = std::sqrt(coefficient_energy(b));
  return ref > 0.0 ? diff / ref : diff;
}

ResidualQuantiles quantiles(std::vector<double> values) {
  if (values.empty()) return {};
  std::sort(values.begin(), values.end());
  const auto pick = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::round(q * static_cast<double>(values.size() - 1)));
    return values[idx];
  };
  return {values.front(), pick(0.5), pick(0.9), values.back()};
}

nlohmann::json to_json(const VerificationReport& report) {
  return {{"test", report.test},
          {"n", report.n},
          {"ensemble_size", report.ensemble_size},
          {"max_ratio", report.max_ratio},
          {"residuals",
           {{"min", report.residuals.min},
            {"median", report.residuals.median},
            {"p90", report.residuals.p90},
            {"max", report.residuals.max}}}};
}

}  // namespace bsq
