#pragma once

// Fields on the periodic torus [0, 2pi)^2 and the pseudo-spectral operators
// acting on them.
//
// Physical samples are stored row-major with row index a along x1 and column
// index b along x2: sample(a, b) = f(2 pi a / n, 2 pi b / n).
//
// Spectral coefficients use the real-to-complex half layout: rows hold
// k1 in {0, 1, ..., n/2, -n/2+1, ..., -1}, columns hold k2 in {0, ..., n/2}.
// The other half plane is implied by Hermitian symmetry. Coefficients are
// normalized so that a constant field c has coefficient c at k = 0.

#include <Eigen/Core>
#include <array>
#include <complex>
#include <cstddef>
#include <span>

#include "bsq/errors.hpp"

namespace bsq {

using Complex = std::complex<double>;
using RealArray = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexArray = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniform n x n collocation grid on the 2 pi periodic square.
class Grid {
 public:
  explicit Grid(int n);

  int n() const { return n_; }
  int half() const { return n_ / 2; }
  /// Columns of the half-spectrum layout.
  int spectral_cols() const { return n_ / 2 + 1; }
  /// 2/3-rule cutoff floor(n/3).
  int dealias_cutoff() const { return n_ / 3; }
  double spacing() const;
  /// Signed wavenumber k1 carried by spectral row `row` (Nyquist row reports +n/2).
  int k1(int row) const { return row <= n_ / 2 ? row : row - n_; }
  int k2(int col) const { return col; }
  /// Largest radial wavenumber present on the grid, |(n/2, n/2)|.
  double max_radial_wavenumber() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
};

/// Real samples of a scalar field. Construction rejects NaN and Inf.
class RealField {
 public:
  RealField(Grid grid, RealArray samples);
  static RealField zeros(Grid grid);

  /// Samples f(x1, x2) of a callable on the collocation points.
  template <typename F>
  static RealField sample(Grid grid, F&& f) {
    const int n = grid.n();
    RealArray values(n, n);
    const double h = grid.spacing();
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) values(a, b) = f(h * a, h * b);
    }
    return RealField(grid, std::move(values));
  }

  const Grid& grid() const { return grid_; }
  const RealArray& samples() const { return samples_; }
  double operator()(int a, int b) const { return samples_(a, b); }

 private:
  Grid grid_;
  RealArray samples_;
};

/// Fourier coefficients of a real field in the half-spectrum layout.
class SpectralField {
 public:
  SpectralField(Grid grid, ComplexArray coeffs);
  static SpectralField zeros(Grid grid);

  const Grid& grid() const { return grid_; }
  const ComplexArray& coeffs() const { return coeffs_; }
  ComplexArray& coeffs() { return coeffs_; }

  /// Coefficient at an arbitrary wave vector with |k_i| <= n/2, using
  /// Hermitian symmetry for k2 < 0.
  Complex at(int k1, int k2) const;
  /// Mean value (the k = 0 coefficient).
  double mean() const { return coeffs_(0, 0).real(); }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

 private:
  Grid grid_;
  ComplexArray coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a);
SpectralField operator*(double s, SpectralField a);
SpectralField operator*(SpectralField a, double s);

/// Pair of spectral fields (u1, u2) such as a velocity or a gradient.
using SpectralVector = std::array<SpectralField, 2>;

SpectralField to_spectral(const RealField& f);
RealField to_physical(const SpectralField& f);

/// Throws ContractViolation when the two grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// i k_axis multiplier (axis 1 or 2); the Nyquist mode along that axis is zeroed.
SpectralField spectral_derivative(const SpectralField& f, int axis);
/// Gradient (d1 f, d2 f).
SpectralVector gradient(const SpectralField& f);
/// Solves Lap psi = f with zero mean; requires |mean(f)| <= 1e-10.
SpectralField invert_laplacian(const SpectralField& f);
/// Stream-function reconstruction u = (-d2 psi, d1 psi), -Lap psi = omega.
SpectralVector velocity_from_vorticity(const SpectralField& omega);
/// d1 u2 - d2 u1.
SpectralField curl(const SpectralVector& u);
/// d1 u1 + d2 u2.
SpectralField divergence(const SpectralVector& u);

/// Zeroes every coefficient with max(|k1|, |k2|) > floor(n/3). Idempotent.
SpectralField dealias(const SpectralField& f);
/// True when no coefficient outside the 2/3-rule cutoff is nonzero.
bool is_dealiased(const SpectralField& f);
/// Pointwise product evaluated on the grid and truncated by the 2/3 rule.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);
/// Advection term u . grad f, dealiased.
SpectralField advect(const SpectralVector& u, const SpectralField& f);

/// Lebesgue norm with respect to the normalized measure dx / (2 pi)^2;
/// p = infinity gives the maximum over collocation points.
double lebesgue_norm(const RealField& f, double p);
double lebesgue_norm(const SpectralField& f, double p);
/// Lebesgue norm of the pointwise Euclidean magnitude of a set of components.
double lebesgue_norm(std::span<const RealField> components, double p);
double lebesgue_norm(const SpectralVector& v, double p);
/// Lebesgue norm of |grad u| (Frobenius magnitude of the 2 x 2 Jacobian).
double velocity_gradient_norm(const SpectralVector& u, double p);

/// Sum over the full Fourier plane of |c_k|^2; equals ||f||_{L^2}^2.
double coefficient_energy(const SpectralField& f);
/// Normalized inner product (2 pi)^-2 \int f g dx, computed spectrally.
double inner_product(const SpectralField& f, const SpectralField& g);

/// Largest pointwise |a - b| between two grid fields.
double max_abs_difference(const RealField& a, const RealField& b);

}  // namespace bsq
