#pragma once

#include <array>

namespace nlslab {

/// C-infinity cutoff: 1 for x <= inner, 0 for x >= outer, built from the
/// exp(-1/s) bridge in between.
double smooth_cutoff(double x, double inner, double outer);

/// Value and first three derivatives of smooth_cutoff at x.
std::array<double, 4> smooth_cutoff_derivatives(double x, double inner, double outer);

}  // namespace nlslab
