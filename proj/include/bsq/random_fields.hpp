#pragma once

// Seeded random band-limited fields. The coefficients depend only on the seed
// and the band parameters, never on the grid, so the same seed produces the
// same continuous field at every resolution that resolves the band.

#include <cstdint>

#include "bsq/spectral.hpp"

namespace bsq {

struct RandomFieldSpec {
  std::uint64_t seed = 0;
  int max_wavenumber = 8;   ///< radial band limit |k| <= K
  double slope = 1.0;       ///< amplitude ~ |k|^-slope
  bool zero_mean = true;
  double l2_norm = 1.0;     ///< rescaled to this L^2 norm (0 leaves raw amplitudes)
};

/// Requires K <= floor(n/3) so the result is dealiased.
SpectralField random_field(const Grid& grid, const RandomFieldSpec& spec);
/// Divergence-free velocity of a random zero-mean vorticity.
SpectralVector random_solenoidal(const Grid& grid, const RandomFieldSpec& spec);

}  // namespace bsq
