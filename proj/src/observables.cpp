#include "nlslab/observables.hpp"

#include "nlslab/kernels.hpp"

namespace nlslab {

double mass(const RadialField& f) { return kernels::weighted_power_sum(f.grid->weights(), f.values, 2); }

double quartic_integral(const RadialField& f) {
  return kernels::weighted_power_sum(f.grid->weights(), f.values, 4);
}

double energy(const SpectralField& F, const RadialField& f, double mu) {
  return 0.5 * gradient_norm_sq(F) + 0.25 * mu * quartic_integral(f);
}

double energy(const RadialField& f, double mu) { return energy(hankel_forward(f), f, mu); }

}  // namespace nlslab
