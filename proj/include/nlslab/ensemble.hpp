#pragma once

#include "nlslab/radial_spectral.hpp"
#include "nlslab/random.hpp"

#include <vector>

namespace nlslab {

/// Finite sum of complex Gaussians f(r) = sum_j c_j exp(-a_j r^2), Re a_j > 0.
/// Transform, free evolution and L2 norm are available in closed form.
struct GaussianMixture {
  struct Term {
    cplx amplitude;
    cplx rate;  // a_j
  };
  std::vector<Term> terms;

  cplx value(double r) const;
  cplx spectrum(double xi) const;
  /// Exact free evolution e^{it Delta} f evaluated at radius r.
  cplx evolved(double t, double r) const;
  double l2_norm() const;
  /// Smallest and largest length scale 1/sqrt(Re a_j).
  double min_width() const;
  double max_width() const;

  RadialField on_grid(GridPtr g) const;
  /// Sampled through the exact spectrum (no aliasing from sampling in r).
  SpectralField spectrum_on_grid(GridPtr g) const;
};

struct EnsembleOptions {
  int size = 64;
  double min_width = 0.25;
  double max_width = 4.0;
  int max_terms = 3;
  double max_chirp = 2.0;  // Im(a)/Re(a) range for chirped members
};

/// Seeded ensemble of rescaled and chirped Gaussian bumps with widths
/// log-uniform in [min_width, max_width].
std::vector<GaussianMixture> random_ensemble(std::uint64_t seed, const EnsembleOptions& opts);

}  // namespace nlslab
