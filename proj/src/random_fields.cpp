#include "bsq/random_fields.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace bsq {

SpectralField random_field(const Grid& grid, const RandomFieldSpec& spec) {
  const int kmax = spec.max_wavenumber;
  if (kmax < 1 || kmax > grid.dealias_cutoff()) {
    std::ostringstream msg;
    msg << "random_field: band limit " << kmax << " outside [1, " << grid.dealias_cutoff() << "]";
    throw ContractViolation(msg.str());
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField f = SpectralField::zeros(grid);
  auto& c = f.coeffs();
  const int n = grid.n();
  if (!spec.zero_mean) c(0, 0) = normal(rng);
  // Upper half plane only (k2 > 0, or k2 == 0 with k1 > 0); the rest follows by symmetry.
  for (int k2 = 0; k2 <= kmax; ++k2) {
    for (int k1 = -kmax; k1 <= kmax; ++k1) {
      if (k2 == 0 && k1 <= 0) continue;
      const double radius = std::hypot(k1, k2);
      if (radius > kmax) continue;
      const double amp = std::pow(radius, -spec.slope);
      const Complex value(amp * normal(rng), amp * normal(rng));
      c((k1 + n) % n, k2) = value;
      if (k2 == 0) c((n - k1) % n, 0) = std::conj(value);
    }
  }
  if (spec.l2_norm > 0.0) {
    const double norm = std::sqrt(coefficient_energy(f));
    if (norm > 0.0) f *= spec.l2_norm / norm;
  }
  return f;
}

SpectralVector random_solenoidal(const Grid& grid, const RandomFieldSpec& spec) {
  RandomFieldSpec vort = spec;
  vort.zero_mean = true;
  return velocity_from_vorticity(random_field(grid, vort));
}

}  // namespace bsq
