#pragma once

// Littlewood-Paley decomposition on the torus and nonhomogeneous Besov norms.
//
// The low-frequency cutoff chi is radial, equal to 1 for |xi| <= 3/4, 0 for
// |xi| >= 4/3, and blends in between with the C-infinity smoothstep built
// from g(t) = exp(-1/t). Blocks are Delta_{-1} = chi(D) and
// Delta_j = phi(2^-j D) with phi(xi) = chi(xi/2) - chi(xi).

#include <iosfwd>
#include <vector>

#include "bsq/spectral.hpp"

namespace bsq {

class CutoffProfile {
 public:
  static constexpr double kInner = 3.0 / 4.0;
  static constexpr double kOuter = 4.0 / 3.0;

  double chi(double radius) const;
  double phi(double radius) const { return chi(radius / 2.0) - chi(radius); }
  /// Multiplier of block j (j = -1 gives chi, j <= -2 gives 0).
  double block_weight(int j, double radius) const;
};

CutoffProfile build_cutoff();

/// Smoothness s, integrability p and summation exponent q of B^s_{p,q}.
struct BesovIndex {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;

  void validate() const;
};

/// Index of the last block that can be nonzero on this grid:
/// the smallest j with 2^j * 3/4 > max radial grid wavenumber.
int max_block_index(const Grid& grid);

struct DyadicDecomposition {
  int j_max = -1;
  /// blocks[i] holds Delta_{i-1} f.
  std::vector<SpectralField> blocks;

  const SpectralField& block(int j) const { return blocks.at(static_cast<std::size_t>(j + 1)); }
  SpectralField sum() const;
};

struct DyadicSpectrum {
  double s = 0.0;
  double p = 2.0;
  /// block_norms[i] = ||Delta_{i-1} f||_{L^p}.
  std::vector<double> block_norms;
  /// weighted[i] = 2^{(i-1) s} block_norms[i] for i >= 1; weighted[0] = block_norms[0].
  std::vector<double> weighted;
};

SpectralField dyadic_block(const SpectralField& f, int j);
DyadicDecomposition decompose(const SpectralField& f);
/// S_j f = sum over j' < j of Delta_j' f.
SpectralField partial_sum(const SpectralField& f, int j);

DyadicSpectrum dyadic_spectrum(const SpectralField& f, double s, double p);
double besov_norm(const SpectralField& f, const BesovIndex& idx);
/// ||f||_{B^0_{inf,1}} + ||f||_{L^r}.
double besov_lr_norm(const SpectralField& f, double r);

/// Vector fields: Besov parts take the max over components, Lebesgue parts
/// use the pointwise Euclidean magnitude.
double besov_norm(const SpectralVector& v, const BesovIndex& idx);
double besov_lr_norm(const SpectralVector& v, double r);

/// l^q norm of a nonnegative sequence (sup when q is infinite).
double sequence_norm(const std::vector<double>& a, double q);

/// CSV with header "j,block_lp_norm,weighted_value".
void write_spectrum_csv(std::ostream& out, const DyadicSpectrum& spectrum);

}  // namespace bsq
