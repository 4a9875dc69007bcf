#include "nlslab/radial_spectral.hpp"

#include "nlslab/bump.hpp"
#include "nlslab/kernels.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/expint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace nlslab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_size(const RadialGrid& g, std::size_t len) {
  if (len != static_cast<std::size_t>(g.size()))
    throw std::invalid_argument("field length does not match grid size");
}
}  // namespace

RadialField::RadialField(GridPtr g, CVec v) : grid(std::move(g)), values(std::move(v)) {
  check_size(*grid, values.size());
}

SpectralField::SpectralField(GridPtr g, CVec c) : grid(std::move(g)), coeffs(std::move(c)) {
  check_size(*grid, coeffs.size());
}

FrequencyBand FrequencyBand::range(double M, double N) {
  if (!(M < N)) throw std::invalid_argument("frequency range needs M < N");
  return {Kind::Range, N, M};
}

double FrequencyBand::upper_edge() const {
  switch (kind) {
    case Kind::Above:
      return std::numeric_limits<double>::infinity();
    case Kind::AtMost:
    case Kind::Dyadic:
    case Kind::Range:
      return 1.1 * N;
  }
  return 1.1 * N;
}

void require_same_grid(const RadialField& a, const RadialField& b) {
  if (a.grid != b.grid &&
      (a.grid->size() != b.grid->size() || a.grid->radius() != b.grid->radius()))
    throw std::invalid_argument("fields live on different grids");
}

// -- transforms --------------------------------------------------------------

void hankel_forward(const RadialGrid& g, std::span<const cplx> values, std::span<cplx> coeffs) {
  const int n = g.size();
  check_size(g, values.size());
  CVec scaled(n);
  const auto sr = g.space_scale();
  const auto sx = g.freq_scale();
  for (int k = 0; k < n; ++k) scaled[k] = sr[k] * values[k];
  kernels::matvec(g.transform_matrix(), scaled, coeffs);
  for (int k = 0; k < n; ++k) coeffs[k] /= sx[k];
}

void hankel_forward_reference(const RadialGrid& g, std::span<const cplx> values, std::span<cplx> coeffs) {
  const int n = g.size();
  CVec scaled(n);
  const auto sr = g.space_scale();
  const auto sx = g.freq_scale();
  for (int k = 0; k < n; ++k) scaled[k] = sr[k] * values[k];
  kernels::reference::matvec(g.transform_matrix(), scaled, coeffs);
  for (int k = 0; k < n; ++k) coeffs[k] /= sx[k];
}

void hankel_inverse(const RadialGrid& g, std::span<const cplx> coeffs, std::span<cplx> values) {
  const int n = g.size();
  check_size(g, coeffs.size());
  CVec scaled(n);
  const auto sr = g.space_scale();
  const auto sx = g.freq_scale();
  for (int k = 0; k < n; ++k) scaled[k] = sx[k] * coeffs[k];
  kernels::matvec(g.transform_matrix(), scaled, values);
  for (int k = 0; k < n; ++k) values[k] /= sr[k];
}

void hankel_inverse_batch(const RadialGrid& g, std::span<const cplx> coeffs, std::span<cplx> values, int count) {
  const int n = g.size();
  const auto sr = g.space_scale();
  const auto sx = g.freq_scale();
  CVec scaled(coeffs.begin(), coeffs.end());
  for (int c = 0; c < count; ++c)
    for (int k = 0; k < n; ++k) scaled[static_cast<std::size_t>(c) * n + k] *= sx[k];
  kernels::matmat(g.transform_matrix(), scaled, values, n);
  for (int c = 0; c < count; ++c)
    for (int k = 0; k < n; ++k) values[static_cast<std::size_t>(c) * n + k] /= sr[k];
}

SpectralField hankel_forward(const RadialField& f) {
  SpectralField F(f.grid);
  hankel_forward(*f.grid, f.values, F.coeffs);
  return F;
}

RadialField hankel_inverse(const SpectralField& F) {
  RadialField f(F.grid);
  hankel_inverse(*F.grid, F.coeffs, f.values);
  return f;
}

cplx evaluate_at(const SpectralField& F, double r) {
  const auto& g = *F.grid;
  if (r >= g.radius()) return 0.0;
  const auto xi = g.xi();
  const auto wx = g.spectral_weights();
  cplx acc = 0.0;
  for (int k = 0; k < g.size(); ++k)
    acc += (wx[k] / kTwoPi) * boost::math::cyl_bessel_j(0.0, xi[k] * r) * F.coeffs[k];
  return acc;
}

CVec evaluate_at(const SpectralField& F, std::span<const double> radii) {
  CVec out(radii.size());
  const auto n = static_cast<std::ptrdiff_t>(radii.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = evaluate_at(F, radii[i]);
  return out;
}

cplx spectrum_at(const RadialField& f, double xi) {
  const auto& g = *f.grid;
  const auto r = g.r();
  const auto w = g.weights();
  cplx acc = 0.0;
  for (int k = 0; k < g.size(); ++k) acc += (w[k] / kTwoPi) * boost::math::cyl_bessel_j(0.0, xi * r[k]) * f.values[k];
  return acc;
}

CVec spectrum_at(const RadialField& f, std::span<const double> xis) {
  CVec out(xis.size());
  const auto n = static_cast<std::ptrdiff_t>(xis.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = spectrum_at(f, xis[i]);
  return out;
}

double spatial_tail_fraction(const RadialField& f, double rho) {
  const auto r = f.grid->r();
  const auto w = f.grid->weights();
  double tail = 0.0, total = 0.0;
  for (int k = 0; k < f.grid->size(); ++k) {
    const double p = w[k] * std::norm(f.values[k]);
    total += p;
    if (r[k] > rho) tail += p;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double spectral_tail_fraction(const SpectralField& F, double kcut) {
  const auto xi = F.grid->xi();
  const auto w = F.grid->spectral_weights();
  double tail = 0.0, total = 0.0;
  for (int k = 0; k < F.grid->size(); ++k) {
    const double p = w[k] * std::norm(F.coeffs[k]);
    total += p;
    if (xi[k] > kcut) tail += p;
  }
  return total > 0.0 ? tail / total : 0.0;
}

cplx value_at_origin(const SpectralField& F) {
  const auto wx = F.grid->spectral_weights();
  cplx acc = 0.0;
  for (int k = 0; k < F.grid->size(); ++k) acc += (wx[k] / kTwoPi) * F.coeffs[k];
  return acc;
}

RadialField radial_derivative(const RadialField& f) {
  const auto F = hankel_forward(f);
  RadialField d(f.grid);
  kernels::matvec(f.grid->derivative_matrix(), F.coeffs, d.values);
  return d;
}

SpectralField free_propagator_multiplier(const SpectralField& F, double t) {
  SpectralField out = F;
  const auto xi = F.grid->xi();
  for (int k = 0; k < F.grid->size(); ++k) {
    const double phase = -t * xi[k] * xi[k];
    out.coeffs[k] *= cplx(std::cos(phase), std::sin(phase));
  }
  return out;
}

RadialField free_evolve(const RadialField& f, double t) {
  return hankel_inverse(free_propagator_multiplier(hankel_forward(f), t));
}

// -- Littlewood-Paley --------------------------------------------------------

double lp_bump(double rho) { return smooth_cutoff(std::abs(rho), 1.0, 1.1); }

double lp_symbol(const FrequencyBand& band, double xi, bool sharp) {
  auto phi = [sharp](double rho) { return sharp ? (rho <= 1.0 ? 1.0 : 0.0) : lp_bump(rho); };
  switch (band.kind) {
    case FrequencyBand::Kind::AtMost:
      return phi(xi / band.N);
    case FrequencyBand::Kind::Above:
      return 1.0 - phi(xi / band.N);
    case FrequencyBand::Kind::Dyadic:
      return phi(xi / band.N) - phi(2.0 * xi / band.N);
    case FrequencyBand::Kind::Range:
      return phi(xi / band.N) - phi(xi / band.M);
  }
  return 0.0;
}

bool lp_band_touches_unresolved(const RadialGrid& g, const FrequencyBand& band) {
  const double edge = band.kind == FrequencyBand::Kind::Above ? band.N : band.upper_edge();
  return edge > g.resolved_kmax();
}

SpectralField lp_project(const SpectralField& F, const FrequencyBand& band, bool sharp) {
  if (!(band.N > 0.0) || (band.kind == FrequencyBand::Kind::Range && !(band.M > 0.0)))
    throw std::invalid_argument("band frequencies must be positive");
  if (band.N > F.grid->kmax())
    throw std::out_of_range("frequency band beyond kmax");
  SpectralField out = F;
  const auto xi = F.grid->xi();
  for (int k = 0; k < F.grid->size(); ++k) out.coeffs[k] *= lp_symbol(band, xi[k], sharp);
  return out;
}

RadialField lp_project(const RadialField& f, const FrequencyBand& band, bool sharp) {
  return hankel_inverse(lp_project(hankel_forward(f), band, sharp));
}

RadialField lp_project_fattened(const RadialField& f, double N) {
  auto F = hankel_forward(f);
  const auto xi = F.grid->xi();
  for (int k = 0; k < F.grid->size(); ++k) {
    const double s = lp_symbol(FrequencyBand::dyadic(N / 2), xi[k], false) +
                     lp_symbol(FrequencyBand::dyadic(N), xi[k], false) +
                     lp_symbol(FrequencyBand::dyadic(2 * N), xi[k], false);
    F.coeffs[k] *= s;
  }
  return hankel_inverse(F);
}

// -- in/out ------------------------------------------------------------------

RadialField in_out_project(const RadialField& f, WaveDirection dir) {
  // [P^{+-} f](r) = f(r)/2 -+ (i / 2pi) PV int_0^R 2 rho f(rho) / (r^2 - rho^2) d rho,
  // the sign fixed by P^+ having the H0^(1) = J0 + i Y0 kernel in frequency.
  //
  // In s = rho^2 the integral is a Hilbert transform. The singular part is
  // removed by subtracting f(r) chi(rho), chi = exp(-(rho^2 - r^2)/sigma^2),
  // whose PV integral over (0, R^2) is Ei(r^2/sigma^2) + E1((R^2 - r^2)/sigma^2).
  // The smooth remainder is integrated by the grid quadrature; its diagonal
  // value is -(f'(r) + 2 r f(r)/sigma^2)/r.
  const auto& g = *f.grid;
  const int n = g.size();
  const auto r = g.r();
  const auto w = g.weights();
  const double R2 = g.radius() * g.radius();
  const RadialField df = radial_derivative(f);

  CVec pv(n);
  for (int j = 0; j < n; ++j) {
    const double rj2 = r[j] * r[j];
    const double sigma2 = 2.0 * rj2 + 1.0;
    cplx acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double wr = w[k] / kTwoPi;  // int ... rho d rho
      if (k == j) {
        acc += wr * (-(df.values[j] + 2.0 * r[j] * f.values[j] / sigma2) / r[j]);
      } else {
        const double rk2 = r[k] * r[k];
        const double chi = std::exp(-(rk2 - rj2) / sigma2);
        acc += wr * 2.0 * (f.values[k] - f.values[j] * chi) / (rj2 - rk2);
      }
    }
    acc += f.values[j] * (boost::math::expint(rj2 / sigma2) + boost::math::expint(1, (R2 - rj2) / sigma2));
    pv[j] = acc;
  }

  RadialField out(f.grid);
  const double sgn = dir == WaveDirection::Outgoing ? -1.0 : 1.0;
  const cplx coeff(0.0, sgn / kTwoPi);
  for (int j = 0; j < n; ++j) out.values[j] = 0.5 * f.values[j] + coeff * pv[j];
  return out;
}

// -- norms -------------------------------------------------------------------

double l2_norm(const RadialField& f) {
  return std::sqrt(kernels::weighted_power_sum(f.grid->weights(), f.values, 2));
}

double l2_norm(const SpectralField& F) {
  return std::sqrt(kernels::weighted_power_sum(F.grid->spectral_weights(), F.coeffs, 2));
}

double lp_norm(const RadialField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm needs p >= 1");
  if (std::isinf(p)) return sup_norm(f);
  const auto w = f.grid->weights();
  double acc = 0.0;
  for (int k = 0; k < f.size(); ++k) acc += w[k] * std::pow(std::abs(f.values[k]), p);
  return std::pow(acc, 1.0 / p);
}

double sup_norm(const RadialField& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return std::max(m, std::abs(value_at_origin(hankel_forward(f))));
}

double l2_distance(const RadialField& a, const RadialField& b) {
  require_same_grid(a, b);
  const auto w = a.grid->weights();
  double acc = 0.0;
  for (int k = 0; k < a.size(); ++k) acc += w[k] * std::norm(a.values[k] - b.values[k]);
  return std::sqrt(acc);
}

double relative_l2_distance(const RadialField& a, const RadialField& b) {
  const double d = l2_distance(a, b);
  const double nb = l2_norm(b);
  return nb > 0.0 ? d / nb : d;
}

double gradient_norm_sq(const SpectralField& F) {
  const auto xi2 = F.grid->xi_squared();
  const auto wx = F.grid->spectral_weights();
  double acc = 0.0;
  for (int k = 0; k < F.grid->size(); ++k) acc += wx[k] * xi2[k] * std::norm(F.coeffs[k]);
  return acc;
}

double gradient_norm_sq(const RadialField& f) { return gradient_norm_sq(hankel_forward(f)); }

double unresolved_spectral_fraction(const SpectralField& F) {
  return spectral_tail_fraction(F, F.grid->resolved_kmax());
}

RadialField operator+(const RadialField& a, const RadialField& b) {
  require_same_grid(a, b);
  RadialField out = a;
  for (int k = 0; k < a.size(); ++k) out.values[k] += b.values[k];
  return out;
}

RadialField operator-(const RadialField& a, const RadialField& b) {
  require_same_grid(a, b);
  RadialField out = a;
  for (int k = 0; k < a.size(); ++k) out.values[k] -= b.values[k];
  return out;
}

RadialField operator*(cplx s, const RadialField& a) {
  RadialField out = a;
  for (auto& v : out.values) v *= s;
  return out;
}

}  // namespace nlslab
