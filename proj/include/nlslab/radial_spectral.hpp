#pragma once

#include "nlslab/radial_grid.hpp"

#include <span>
#include <string>

namespace nlslab {

/// Complex radial function sampled at the grid nodes.
struct RadialField {
  GridPtr grid;
  CVec values;

  RadialField() = default;
  explicit RadialField(GridPtr g) : grid(std::move(g)), values(grid->size()) {}
  RadialField(GridPtr g, CVec v);

  int size() const noexcept { return static_cast<int>(values.size()); }
};

/// Order-0 Hankel coefficients u^(xi[k]) under the (2 pi)^{-1} convention.
struct SpectralField {
  GridPtr grid;
  CVec coeffs;

  SpectralField() = default;
  explicit SpectralField(GridPtr g) : grid(std::move(g)), coeffs(grid->size()) {}
  SpectralField(GridPtr g, CVec c);
};

/// Frequency band for Littlewood-Paley multipliers.
struct FrequencyBand {
  enum class Kind { AtMost, Above, Dyadic, Range };
  Kind kind = Kind::AtMost;
  double N = 1.0;
  double M = 0.0;  // lower edge for Range

  static FrequencyBand at_most(double N) { return {Kind::AtMost, N, 0.0}; }
  static FrequencyBand above(double N) { return {Kind::Above, N, 0.0}; }
  static FrequencyBand dyadic(double N) { return {Kind::Dyadic, N, 0.0}; }
  /// P_{M < . <= N}; requires M < N.
  static FrequencyBand range(double M, double N);

  /// Largest frequency at which the multiplier can be nonzero (infinity for Above).
  double upper_edge() const;
};

// -- transforms --------------------------------------------------------------

SpectralField hankel_forward(const RadialField& f);
RadialField hankel_inverse(const SpectralField& F);

/// Same transforms on raw vectors over a given grid (no allocation of fields).
void hankel_forward(const RadialGrid& g, std::span<const cplx> values, std::span<cplx> coeffs);
void hankel_inverse(const RadialGrid& g, std::span<const cplx> coeffs, std::span<cplx> values);

/// Serial reference path for the transform (tests and benchmarks only).
void hankel_forward_reference(const RadialGrid& g, std::span<const cplx> values, std::span<cplx> coeffs);

/// Batched inverse transform of `count` coefficient vectors stored back to back.
void hankel_inverse_batch(const RadialGrid& g, std::span<const cplx> coeffs, std::span<cplx> values, int count);

/// Band-limited interpolant sum_k (w_xi[k]/2pi) J0(xi[k] r) F[k] evaluated at r;
/// zero for r >= R.
cplx evaluate_at(const SpectralField& F, double r);
/// evaluate_at over many radii (parallel).
CVec evaluate_at(const SpectralField& F, std::span<const double> radii);
/// Quadrature value of the transform int J0(xi r) f(r) r dr at any xi (accurate for xi <= kmax).
cplx spectrum_at(const RadialField& f, double xi);
CVec spectrum_at(const RadialField& f, std::span<const double> xis);
/// Fraction of mass at r > rho, and of spectral mass at xi > k.
double spatial_tail_fraction(const RadialField& f, double rho);
double spectral_tail_fraction(const SpectralField& F, double k);

/// Value at the origin of the band-limited interpolant.
cplx value_at_origin(const SpectralField& F);

/// d/dr at the grid nodes, computed spectrally.
RadialField radial_derivative(const RadialField& f);

/// e^{-i t xi^2} multiplier; exactly unitary in the discrete norm.
SpectralField free_propagator_multiplier(const SpectralField& F, double t);
/// Convenience: hankel_inverse(free_propagator_multiplier(hankel_forward(f), t)).
RadialField free_evolve(const RadialField& f, double t);

// -- Littlewood-Paley --------------------------------------------------------

/// Smooth radial bump: 1 on [0,1], 0 on [11/10, inf), C-infinity bridge between.
double lp_bump(double rho);

/// Multiplier value at frequency xi; `sharp` swaps the bump for an indicator.
double lp_symbol(const FrequencyBand& band, double xi, bool sharp);

/// Throws std::out_of_range when the band exceeds kmax. Bands reaching past
/// 0.8*kmax are accepted but flagged through lp_band_touches_unresolved().
RadialField lp_project(const RadialField& f, const FrequencyBand& band, bool sharp = false);
SpectralField lp_project(const SpectralField& F, const FrequencyBand& band, bool sharp = false);
bool lp_band_touches_unresolved(const RadialGrid& g, const FrequencyBand& band);

/// Fattened projection P_{N/2} + P_N + P_{2N}.
RadialField lp_project_fattened(const RadialField& f, double N);

// -- in/out decomposition ----------------------------------------------------

enum class WaveDirection { Outgoing, Incoming };

/// P^{+} (outgoing) or P^{-} (incoming) applied to radial data.
RadialField in_out_project(const RadialField& f, WaveDirection dir);

// -- norms -------------------------------------------------------------------

double l2_norm(const RadialField& f);
double l2_norm(const SpectralField& F);
/// ||f||_p for p >= 1 by grid quadrature.
double lp_norm(const RadialField& f, double p);
/// max over nodes and the origin.
double sup_norm(const RadialField& f);
/// Relative L2 distance ||a - b|| / ||b|| (absolute when b == 0).
double relative_l2_distance(const RadialField& a, const RadialField& b);
double l2_distance(const RadialField& a, const RadialField& b);

/// ||grad f||_2^2 by Plancherel.
double gradient_norm_sq(const RadialField& f);
double gradient_norm_sq(const SpectralField& F);

/// Fraction of spectral mass above 0.8*kmax.
double unresolved_spectral_fraction(const SpectralField& F);

/// Samples fn(r) at the grid nodes.
template <class Fn>
RadialField sample(GridPtr g, Fn&& fn) {
  RadialField f(g);
  const auto r = g->r();
  for (int k = 0; k < g->size(); ++k) f.values[k] = fn(r[k]);
  return f;
}

/// Spectral field from its coefficient function F(xi).
template <class Fn>
SpectralField sample_spectrum(GridPtr g, Fn&& fn) {
  SpectralField F(g);
  const auto xi = g->xi();
  for (int k = 0; k < g->size(); ++k) F.coeffs[k] = fn(xi[k]);
  return F;
}

RadialField operator+(const RadialField& a, const RadialField& b);
RadialField operator-(const RadialField& a, const RadialField& b);
RadialField operator*(cplx s, const RadialField& a);

void require_same_grid(const RadialField& a, const RadialField& b);

}  // namespace nlslab
