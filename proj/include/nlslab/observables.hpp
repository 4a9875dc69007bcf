#pragma once

#include "nlslab/radial_spectral.hpp"

namespace nlslab {

/// int |f|^2 dx over R^2.
double mass(const RadialField& f);
/// int 1/2 |grad f|^2 + mu/4 |f|^4 dx, gradient taken spectrally.
double energy(const RadialField& f, double mu);
double energy(const SpectralField& F, const RadialField& f, double mu);
/// int |f|^4 dx.
double quartic_integral(const RadialField& f);

}  // namespace nlslab
