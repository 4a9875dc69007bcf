#include "nlslab/bump.hpp"

#include <cmath>

namespace nlslab {

namespace {

// Truncated Taylor series c0 + c1 h + c2 h^2 + c3 h^3.
struct Jet {
  std::array<double, 4> c{};
};

Jet operator+(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k < 4; ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i <= k; ++i) r.c[k] += a.c[i] * b.c[k - i];
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  Jet q;
  for (int k = 0; k < 4; ++k) {
    double s = a.c[k];
    for (int i = 0; i < k; ++i) s -= q.c[i] * b.c[k - i];
    q.c[k] = s / b.c[0];
  }
  return q;
}

Jet exp(const Jet& a) {
  const double e = std::exp(a.c[0]);
  const double a1 = a.c[1], a2 = a.c[2], a3 = a.c[3];
  return Jet{{e, e * a1, e * (a2 + 0.5 * a1 * a1), e * (a3 + a1 * a2 + a1 * a1 * a1 / 6.0)}};
}

Jet variable(double x) { return Jet{{x, 1.0, 0.0, 0.0}}; }
Jet constant(double x) { return Jet{{x, 0.0, 0.0, 0.0}}; }

// exp(-1/s), zero (with all derivatives) for s <= 0.
Jet bridge(const Jet& s) {
  if (s.c[0] <= 0.0) return Jet{};
  return exp(constant(-1.0) / s);
}

}  // namespace

std::array<double, 4> smooth_cutoff_derivatives(double x, double inner, double outer) {
  if (x <= inner) return {1.0, 0.0, 0.0, 0.0};
  if (x >= outer) return {0.0, 0.0, 0.0, 0.0};
  const double width = outer - inner;
  const Jet s = variable((x - inner) / width);
  const Jet up = bridge(s);
  const Jet down = bridge(constant(1.0) + constant(-1.0) * s);
  const Jet cut = down / (up + down);
  return {cut.c[0], cut.c[1] / width, 2.0 * cut.c[2] / (width * width),
          6.0 * cut.c[3] / (width * width * width)};
}

double smooth_cutoff(double x, double inner, double outer) {
  if (x <= inner) return 1.0;
  if (x >= outer) return 0.0;
  const double s = (x - inner) / (outer - inner);
  const double up = std::exp(-1.0 / s);
  const double down = std::exp(-1.0 / (1.0 - s));
  return down / (up + down);
}

}  // namespace nlslab
