#include "bsq/littlewood_paley.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>

namespace bsq {

namespace {

double smoothstep_seed(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Radial multipliers for every block of one grid size, built once.
struct BlockMultipliers {
  int j_max = -1;
  std::vector<RealArray> weights;  // weights[i] for block i - 1
};

const BlockMultipliers& multipliers_for(const Grid& grid) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<BlockMultipliers>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[grid.n()];
  if (!slot) {
    slot = std::make_unique<BlockMultipliers>();
    const CutoffProfile profile = build_cutoff();
    slot->j_max = max_block_index(grid);
    for (int j = -1; j <= slot->j_max; ++j) {
      RealArray w(grid.n(), grid.spectral_cols());
      for (int r = 0; r < grid.n(); ++r) {
        const double k1 = grid.k1(r);
        for (int c = 0; c < grid.spectral_cols(); ++c) {
          w(r, c) = profile.block_weight(j, std::hypot(k1, static_cast<double>(c)));
        }
      }
      slot->weights.push_back(std::move(w));
    }
  }
  return *slot;
}

SpectralField apply_weight(const SpectralField& f, const RealArray& w) {
  return SpectralField(f.grid(), f.coeffs() * w.cast<Complex>());
}

}  // namespace

double CutoffProfile::chi(double radius) const {
  const double r = std::abs(radius);
  if (r <= kInner) return 1.0;
  if (r >= kOuter) return 0.0;
  const double rise = smoothstep_seed(kOuter - r);
  const double fall = smoothstep_seed(r - kInner);
  return rise / (rise + fall);
}

double CutoffProfile::block_weight(int j, double radius) const {
  if (j <= -2) return 0.0;
  if (j == -1) return chi(radius);
  return phi(std::ldexp(radius, -j));
}

CutoffProfile build_cutoff() { return CutoffProfile{}; }

void BesovIndex::validate() const {
  if (!(p >= 1.0) || !(q >= 1.0) || std::isnan(s)) {
    std::ostringstream msg;
    msg << "BesovIndex: need p, q >= 1 (got s=" << s << ", p=" << p << ", q=" << q << ")";
    throw PreconditionError(msg.str());
  }
}

int max_block_index(const Grid& grid) {
  const double kmax = grid.max_radial_wavenumber();
  int j = 0;
  while (std::ldexp(CutoffProfile::kInner, j) <= kmax) ++j;
  return j;
}

SpectralField DyadicDecomposition::sum() const {
  SpectralField total = SpectralField::zeros(blocks.front().grid());
  for (const auto& b : blocks) total += b;
  return total;
}

SpectralField dyadic_block(const SpectralField& f, int j) {
  const auto& m = multipliers_for(f.grid());
  if (j <= -2 || j > m.j_max) return SpectralField::zeros(f.grid());
  return apply_weight(f, m.weights[static_cast<std::size_t>(j + 1)]);
}

DyadicDecomposition decompose(const SpectralField& f) {
  const auto& m = multipliers_for(f.grid());
  DyadicDecomposition d;
  d.j_max = m.j_max;
  d.blocks.reserve(m.weights.size());
  for (const auto& w : m.weights) d.blocks.push_back(apply_weight(f, w));
  return d;
}

SpectralField partial_sum(const SpectralField& f, int j) {
  const auto& m = multipliers_for(f.grid());
  RealArray w = RealArray::Zero(f.grid().n(), f.grid().spectral_cols());
  for (int jj = -1; jj < j && jj <= m.j_max; ++jj) w += m.weights[static_cast<std::size_t>(jj + 1)];
  return apply_weight(f, w);
}

DyadicSpectrum dyadic_spectrum(const SpectralField& f, double s, double p) {
  const auto& m = multipliers_for(f.grid());
  DyadicSpectrum spec;
  spec.s = s;
  spec.p = p;
  for (int j = -1; j <= m.j_max; ++j) {
    const double norm =
        lebesgue_norm(apply_weight(f, m.weights[static_cast<std::size_t>(j + 1)]), p);
    spec.block_norms.push_back(norm);
    // The low-frequency block carries weight 1 so that a constant has norm |c| for every s.
    spec.weighted.push_back(j < 0 ? norm : std::pow(2.0, j * s) * norm);
  }
  return spec;
}

double sequence_norm(const std::vector<double>& a, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : a) m = std::max(m, v);
    return m;
  }
  if (q == 1.0) {
    double sum = 0.0;
    for (double v : a) sum += v;
    return sum;
  }
  double peak = 0.0;
  for (double v : a) peak = std::max(peak, v);
  if (peak == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : a) sum += std::pow(v / peak, q);
  return peak * std::pow(sum, 1.0 / q);
}

double besov_norm(const SpectralField& f, const BesovIndex& idx) {
  idx.validate();
  return sequence_norm(dyadic_spectrum(f, idx.s, idx.p).weighted, idx.q);
}

namespace {

void require_lr_exponent(double r) {
  if (!(r > 1.0) || std::isinf(r)) {
    std::ostringstream msg;
    msg << "besov_lr_norm: r must lie in (1, inf) (got " << r << ")";
    throw PreconditionError(msg.str());
  }
}

}  // namespace

double besov_lr_norm(const SpectralField& f, double r) {
  require_lr_exponent(r);
  return besov_norm(f, {0.0, INFINITY, 1.0}) + lebesgue_norm(f, r);
}

double besov_norm(const SpectralVector& v, const BesovIndex& idx) {
  return std::max(besov_norm(v[0], idx), besov_norm(v[1], idx));
}

double besov_lr_norm(const SpectralVector& v, double r) {
  require_lr_exponent(r);
  return besov_norm(v, {0.0, INFINITY, 1.0}) + lebesgue_norm(v, r);
}

void write_spectrum_csv(std::ostream& out, const DyadicSpectrum& spectrum) {
  out << "j,block_lp_norm,weighted_value\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < spectrum.block_norms.size(); ++i) {
    out << static_cast<int>(i) - 1 << ',' << spectrum.block_norms[i] << ','
        << spectrum.weighted[i] << '\n';
  }
}

}  // namespace bsq
