#pragma once

#include "bsq/spectral.hpp"

namespace bsq {

/// Time, relative temperature and scalar vorticity in spectral form. Both
/// fields are kept dealiased and the vorticity has zero mean; the velocity is
/// always reconstructed from the vorticity.
class SolverState {
 public:
  /// Dealiases both fields; throws PreconditionError if |mean(omega)| > 1e-12
  /// and ContractViolation on a grid mismatch.
  SolverState(double t, SpectralField theta, SpectralField omega);

  static SolverState from_physical(double t, const RealField& theta, const RealField& omega);

  double t() const { return t_; }
  const Grid& grid() const { return theta_.grid(); }
  const SpectralField& theta() const { return theta_; }
  const SpectralField& omega() const { return omega_; }
  SpectralVector velocity() const { return velocity_from_vorticity(omega_); }

 private:
  double t_;
  SpectralField theta_;
  SpectralField omega_;
};

}  // namespace bsq
