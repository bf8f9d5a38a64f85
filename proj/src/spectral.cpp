#include "bsq/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace bsq {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per grid size under a lock and never destroyed.
struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

const FftPlans& plans_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<FftPlans>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    slot = std::make_unique<FftPlans>();
    const int cols = n / 2 + 1;
    std::vector<double> real(static_cast<std::size_t>(n) * n);
    std::vector<fftw_complex> spec(static_cast<std::size_t>(n) * cols);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    slot->forward = fftw_plan_dft_r2c_2d(n, n, real.data(), spec.data(), flags);
    slot->backward = fftw_plan_dft_c2r_2d(n, n, spec.data(), real.data(), flags);
  }
  return *slot;
}

void require_finite(const RealArray& a) {
  if (!a.allFinite()) throw NonFiniteSample("RealField: non-finite sample");
}

}  // namespace

Grid::Grid(int n) : n_(n) {
  if (n < 8 || n % 2 != 0) {
    std::ostringstream msg;
    msg << "Grid: n must be even and >= 8 (got " << n << ")";
    throw ContractViolation(msg.str());
  }
}

double Grid::spacing() const { return 2.0 * std::numbers::pi / n_; }

double Grid::max_radial_wavenumber() const { return std::sqrt(2.0) * (n_ / 2); }

RealField::RealField(Grid grid, RealArray samples) : grid_(grid), samples_(std::move(samples)) {
  if (samples_.rows() != grid_.n() || samples_.cols() != grid_.n()) {
    throw ContractViolation("RealField: sample array does not match grid");
  }
  require_finite(samples_);
}

RealField RealField::zeros(Grid grid) {
  return RealField(grid, RealArray::Zero(grid.n(), grid.n()));
}

SpectralField::SpectralField(Grid grid, ComplexArray coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != grid_.n() || coeffs_.cols() != grid_.spectral_cols()) {
    throw ContractViolation("SpectralField: coefficient array does not match grid");
  }
}

SpectralField SpectralField::zeros(Grid grid) {
  return SpectralField(grid, ComplexArray::Zero(grid.n(), grid.spectral_cols()));
}

Complex SpectralField::at(int k1, int k2) const {
  const int n = grid_.n();
  const int h = n / 2;
  if (std::abs(k1) > h || std::abs(k2) > h) {
    throw ContractViolation("SpectralField::at: wave vector outside grid");
  }
  const auto row_of = [n](int k) { return (k % n + n) % n; };
  if (k2 >= 0) return coeffs_(row_of(k1), k2);
  return std::conj(coeffs_(row_of(-k1), -k2));
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "SpectralField::operator+=");
  coeffs_ += other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "SpectralField::operator-=");
  coeffs_ -= other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator-(SpectralField a) { return a *= -1.0; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }
SpectralField operator*(SpectralField a, double s) { return a *= s; }

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) {
    std::ostringstream msg;
    msg << where << ": grid mismatch (n=" << a.n() << " vs n=" << b.n() << ")";
    throw ContractViolation(msg.str());
  }
}

SpectralField to_spectral(const RealField& f) {
  const Grid& grid = f.grid();
  const int n = grid.n();
  ComplexArray coeffs(n, grid.spectral_cols());
  RealArray input = f.samples();
  fftw_execute_dft_r2c(plans_for(n).forward, input.data(),
                       reinterpret_cast<fftw_complex*>(coeffs.data()));
  coeffs /= static_cast<double>(n) * n;
  return SpectralField(grid, std::move(coeffs));
}

RealField to_physical(const SpectralField& f) {
  const Grid& grid = f.grid();
  const int n = grid.n();
  ComplexArray input = f.coeffs();  // c2r overwrites its input
  RealArray out(n, n);
  fftw_execute_dft_c2r(plans_for(n).backward, reinterpret_cast<fftw_complex*>(input.data()),
                       out.data());
  return RealField(grid, std::move(out));
}

SpectralField spectral_derivative(const SpectralField& f, int axis) {
  if (axis != 1 && axis != 2) throw ContractViolation("spectral_derivative: axis must be 1 or 2");
  const Grid& grid = f.grid();
  const int n = grid.n();
  const int h = grid.half();
  ComplexArray out(n, grid.spectral_cols());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < grid.spectral_cols(); ++c) {
      const int k = axis == 1 ? grid.k1(r) : grid.k2(c);
      out(r, c) = k == h ? Complex{} : Complex(0.0, k) * f.coeffs()(r, c);
    }
  }
  return SpectralField(grid, std::move(out));
}

SpectralVector gradient(const SpectralField& f) {
  return {spectral_derivative(f, 1), spectral_derivative(f, 2)};
}

SpectralField invert_laplacian(const SpectralField& f) {
  const double mean = f.mean();
  if (std::abs(mean) > 1e-10 || std::abs(f.coeffs()(0, 0).imag()) > 1e-10) {
    std::ostringstream msg;
    msg << "invert_laplacian: field must have zero mean (mean = " << mean << ")";
    throw PreconditionError(msg.str());
  }
  const Grid& grid = f.grid();
  ComplexArray out(grid.n(), grid.spectral_cols());
  for (int r = 0; r < grid.n(); ++r) {
    const double k1 = grid.k1(r);
    for (int c = 0; c < grid.spectral_cols(); ++c) {
      const double k2 = c;
      const double k_sq = k1 * k1 + k2 * k2;
      out(r, c) = k_sq == 0.0 ? Complex{} : -f.coeffs()(r, c) / k_sq;
    }
  }
  return SpectralField(grid, std::move(out));
}

SpectralVector velocity_from_vorticity(const SpectralField& omega) {
  const SpectralField psi = invert_laplacian(omega);
  return {-spectral_derivative(psi, 2), spectral_derivative(psi, 1)};
}

SpectralField curl(const SpectralVector& u) {
  return spectral_derivative(u[1], 1) - spectral_derivative(u[0], 2);
}

SpectralField divergence(const SpectralVector& u) {
  return spectral_derivative(u[0], 1) + spectral_derivative(u[1], 2);
}

SpectralField dealias(const SpectralField& f) {
  const Grid& grid = f.grid();
  const int kc = grid.dealias_cutoff();
  SpectralField out = f;
  auto& c = out.coeffs();
  for (int r = 0; r < grid.n(); ++r) {
    if (std::abs(grid.k1(r)) > kc) {
      c.row(r).setZero();
    } else if (kc + 1 < grid.spectral_cols()) {
      c.row(r).tail(grid.spectral_cols() - kc - 1).setZero();
    }
  }
  return out;
}

bool is_dealiased(const SpectralField& f) {
  const Grid& grid = f.grid();
  const int kc = grid.dealias_cutoff();
  for (int r = 0; r < grid.n(); ++r) {
    for (int c = 0; c < grid.spectral_cols(); ++c) {
      if ((std::abs(grid.k1(r)) > kc || c > kc) && f.coeffs()(r, c) != Complex{}) return false;
    }
  }
  return true;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "dealiased_product");
  const RealField pf = to_physical(f);
  const RealField pg = to_physical(g);
  return dealias(to_spectral(RealField(f.grid(), pf.samples() * pg.samples())));
}

SpectralField advect(const SpectralVector& u, const SpectralField& f) {
  require_same_grid(u[0].grid(), f.grid(), "advect");
  require_same_grid(u[1].grid(), f.grid(), "advect");
  const RealField u1 = to_physical(u[0]);
  const RealField u2 = to_physical(u[1]);
  const RealField f1 = to_physical(spectral_derivative(f, 1));
  const RealField f2 = to_physical(spectral_derivative(f, 2));
  RealArray prod = u1.samples() * f1.samples() + u2.samples() * f2.samples();
  return dealias(to_spectral(RealField(f.grid(), std::move(prod))));
}

namespace {

double norm_of_magnitude(const RealArray& magnitude, double p) {
  if (!(p >= 1.0)) {
    std::ostringstream msg;
    msg << "lebesgue_norm: exponent p must be >= 1 (got " << p << ")";
    throw PreconditionError(msg.str());
  }
  if (std::isinf(p)) return magnitude.maxCoeff();
  if (p == 1.0) return magnitude.mean();
  if (p == 2.0) return std::sqrt(magnitude.square().mean());
  // Scale by the maximum to keep pow() in range for large p.
  const double peak = magnitude.maxCoeff();
  if (peak == 0.0) return 0.0;
  return peak * std::pow((magnitude / peak).pow(p).mean(), 1.0 / p);
}

}  // namespace

double lebesgue_norm(const RealField& f, double p) {
  return norm_of_magnitude(f.samples().abs(), p);
}

double lebesgue_norm(const SpectralField& f, double p) { return lebesgue_norm(to_physical(f), p); }

double lebesgue_norm(std::span<const RealField> components, double p) {
  if (components.empty()) throw ContractViolation("lebesgue_norm: no components");
  const Grid& grid = components.front().grid();
  RealArray sq = RealArray::Zero(grid.n(), grid.n());
  for (const auto& c : components) {
    require_same_grid(grid, c.grid(), "lebesgue_norm");
    sq += c.samples().square();
  }
  return norm_of_magnitude(sq.sqrt(), p);
}

double lebesgue_norm(const SpectralVector& v, double p) {
  const std::array<RealField, 2> parts{to_physical(v[0]), to_physical(v[1])};
  return lebesgue_norm(std::span<const RealField>(parts), p);
}

double velocity_gradient_norm(const SpectralVector& u, double p) {
  const std::array<RealField, 4> parts{
      to_physical(spectral_derivative(u[0], 1)), to_physical(spectral_derivative(u[0], 2)),
      to_physical(spectral_derivative(u[1], 1)), to_physical(spectral_derivative(u[1], 2))};
  return lebesgue_norm(std::span<const RealField>(parts), p);
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  const Grid& grid = f.grid();
  const int last = grid.spectral_cols() - 1;
  double sum = 0.0;
  for (int r = 0; r < grid.n(); ++r) {
    for (int c = 0; c <= last; ++c) {
      const double w = (c == 0 || c == last) ? 1.0 : 2.0;
      sum += w * (f.coeffs()(r, c) * std::conj(g.coeffs()(r, c))).real();
    }
  }
  return sum;
}

double coefficient_energy(const SpectralField& f) { return inner_product(f, f); }

double max_abs_difference(const RealField& a, const RealField& b) {
  require_same_grid(a.grid(), b.grid(), "max_abs_difference");
  return (a.samples() - b.samples()).abs().maxCoeff();
}

}  // namespace bsq
