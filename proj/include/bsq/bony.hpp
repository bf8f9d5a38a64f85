#pragma once

// Bony paraproduct calculus and the transport commutator [u, Delta_j] . grad w.
//
// Every pointwise product is evaluated on the grid and truncated by the 2/3
// rule, so on dealiased inputs the identities below hold to rounding error.

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "bsq/littlewood_paley.hpp"
#include "bsq/spectral.hpp"

namespace bsq {

/// T_f g = sum_j S_{j-1} f Delta_j g.
SpectralField paraproduct(const SpectralField& f, const SpectralField& g);
/// R(f, g) = sum_j sum_{|j' - j| <= 1} Delta_j f Delta_j' g.
SpectralField remainder(const SpectralField& f, const SpectralField& g);

struct BonySplit {
  SpectralField t_fg;  ///< T_f g
  SpectralField t_gf;  ///< T_g f
  SpectralField rem;   ///< R(f, g)

  SpectralField sum() const { return t_fg + t_gf + rem; }
};

/// Requires dealiased inputs; the parts sum to dealias(f g).
BonySplit bony_split(const SpectralField& f, const SpectralField& g);

/// u . grad(Delta_j w) - Delta_j(u . grad w). Requires div u = 0.
SpectralField commutator(const SpectralVector& u, int j, const SpectralField& w);

/// Six-term split of the commutator with u~ = u - Delta_{-1} u:
///   R1 = [T_{u~^k}, Delta_j] d_k w        R2 = T_{d_k Delta_j w} u~^k
///   R3 = -Delta_j T_{d_k w} u~^k           R4 = d_k R(u~^k, Delta_j w)
///   R5 = -d_k Delta_j R(u~^k, w)           R6 = [Delta_{-1} u^k, Delta_j] d_k w
struct CommutatorSplit {
  std::array<SpectralField, 6> terms;
  SpectralVector tilde_u;

  SpectralField sum() const;
};

CommutatorSplit six_term_decomposition(const SpectralVector& u, int j, const SpectralField& w);

/// ||(2^{j(s-1)} ||[u, Delta_j] . grad w||_{L^p})_j||_{l^q} divided by
/// ||grad u||_{L^inf} ||w||_{B^{s-1}_{p,q}}. Requires s > 0; zero when grad u = 0.
double commutator_ratio(const SpectralVector& u, const SpectralField& w, const BesovIndex& idx);

/// Temperature variant: ||(2^{js} ||[u, Delta_j] . grad theta||_{L^p})_j||_{l^q} divided by
/// ||grad u||_inf ||theta||_{B^s_{p,q}} + ||grad theta||_inf ||w||_{B^{s-1}_{p,q}}.
double commutator_ratio_theta(const SpectralVector& u, const SpectralField& w,
                              const SpectralField& theta, const BesovIndex& idx);

/// Relative L^2 residual ||a - b|| / ||b|| (absolute when b vanishes).
double relative_l2_residual(const SpectralField& a, const SpectralField& b);

struct ResidualQuantiles {
  double min = 0.0;
  double median = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};

ResidualQuantiles quantiles(std::vector<double> values);

struct VerificationReport {
  std::string test;
  int n = 0;
  int ensemble_size = 0;
  double max_ratio = 0.0;
  ResidualQuantiles residuals;
};

nlohmann::json to_json(const VerificationReport& report);

}  // namespace bsq
