#include "nlslab/groundstate.hpp"

#include "nlslab/errors.hpp"
#include "nlslab/kernels.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nlslab {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;  // (Q, Q')

constexpr double kStartRadius = 1e-3;
constexpr double kOuterRadius = 25.0;

struct RadialOde {
  void operator()(const State& y, State& dy, double r) const {
    dy[0] = y[1];
    dy[1] = -y[1] / r + y[0] - y[0] * y[0] * y[0];
  }
};

// Series start Q = a + c2 r^2 + c4 r^4 avoids the 1/r singularity.
State series_start(double a) {
  const double c2 = (a - a * a * a) / 4.0;
  const double c4 = (1.0 - 3.0 * a * a) * c2 / 16.0;
  const double r = kStartRadius;
  return {a + c2 * r * r + c4 * r * r * r * r, 2.0 * c2 * r + 4.0 * c4 * r * r * r};
}

auto make_stepper(double abs_tol = 1e-14) {
  return odeint::make_controlled(abs_tol, 1e-14, odeint::runge_kutta_fehlberg78<State>());
}

enum class Outcome { CrossesZero, TurnsUp, Undecided };

// Too large a Q(0) crosses zero; too small turns back up while still positive.
Outcome classify(double a) {
  State y = series_start(a);
  auto stepper = make_stepper();
  double r = kStartRadius, dr = 1e-3;
  while (r < 60.0) {
    if (stepper.try_step(RadialOde{}, y, r, dr) != odeint::success) continue;
    if (y[0] < 0.0) return Outcome::CrossesZero;
    if (y[1] > 0.0) return Outcome::TurnsUp;
    dr = std::min(dr, 0.05);
  }
  return Outcome::Undecided;
}

// Samples the shooting trajectory at the requested radii (sorted ascending).
std::vector<double> trajectory_at(double a, const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  std::vector<double> times;
  times.push_back(kStartRadius);
  times.insert(times.end(), radii.begin(), radii.end());
  State y = series_start(a);
  odeint::integrate_times(make_stepper(), RadialOde{}, y, times.begin(), times.end(), 1e-3,
                          [&](const State& s, double r) {
                            if (r > kStartRadius) out.push_back(s[0]);
                          });
  return out;
}

double laplacian_residual_sup(const RadialField& f, double rmax) {
  auto F = hankel_forward(f);
  const auto xi = F.grid->xi();
  for (int k = 0; k < F.grid->size(); ++k) F.coeffs[k] *= -xi[k] * xi[k];
  const auto lap = hankel_inverse(F);
  double worst = 0.0;
  const auto r = f.grid->r();
  for (int k = 0; k < f.size(); ++k) {
    if (r[k] > rmax) break;
    const cplx v = f.values[k];
    worst = std::max(worst, std::abs(lap.values[k] + std::norm(v) * v - v));
  }
  return worst;
}

void fill_observables(GroundState& gs) {
  const auto& f = gs.profile;
  gs.mass = kernels::weighted_power_sum(f.grid->weights(), f.values, 2);
  gs.l4_norm_4 = kernels::weighted_power_sum(f.grid->weights(), f.values, 4);
  gs.grad_norm_sq = gradient_norm_sq(f);
  gs.q0 = std::abs(value_at_origin(hankel_forward(f)));
  gs.residual = ground_state_residual(f, 0.5 * f.grid->radius());
}

}  // namespace

std::string to_string(GroundState::Method m) {
  return m == GroundState::Method::Shooting ? "shooting" : "gradient-flow";
}

double ground_state_residual(const RadialField& f, double rmax) { return laplacian_residual_sup(f, rmax); }

double gn_ratio(const RadialField& f, double ground_state_mass) {
  const double m = kernels::weighted_power_sum(f.grid->weights(), f.values, 2);
  if (!(m > 0.0)) throw std::invalid_argument("gn_ratio of the zero field");
  const double l4 = kernels::weighted_power_sum(f.grid->weights(), f.values, 4);
  return l4 * ground_state_mass / (2.0 * m * gradient_norm_sq(f));
}

GroundState shoot_ground_state(double tol, GridPtr grid) {
  if (!(tol >= 1e-13)) throw std::invalid_argument("shooting tolerance must be >= 1e-13");

  // bracket by doubling/halving from Q(0) = 2
  double lo = 2.0, hi = 2.0;
  Outcome at = classify(2.0);
  for (int i = 0; i < 60 && at != Outcome::Undecided; ++i) {
    if (at == Outcome::TurnsUp) {
      lo = hi;
      hi *= 2.0;
      if (classify(hi) == Outcome::CrossesZero) break;
    } else {
      hi = lo;
      lo *= 0.5;
      if (classify(lo) == Outcome::TurnsUp) break;
    }
  }
  if (!(classify(lo) == Outcome::TurnsUp && classify(hi) == Outcome::CrossesZero))
    throw NumericFailure("shooting bracket not found");

  while (hi - lo > std::max(tol * lo, 4.0 * std::numeric_limits<double>::epsilon() * hi)) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (classify(mid) == Outcome::TurnsUp ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);

  // fine radial samples to locate where the bracketing trajectories split
  std::vector<double> probe;
  for (double r = 0.05; r <= kOuterRadius; r += 0.05) probe.push_back(r);
  const auto qlo = trajectory_at(lo, probe);
  const auto qhi = trajectory_at(hi, probe);
  double r_match = probe.front();
  for (std::size_t i = 0; i < probe.size() && i < qlo.size() && i < qhi.size(); ++i) {
    const double mid = 0.5 * (qlo[i] + qhi[i]);
    if (!(mid > 0.0) || std::abs(qhi[i] - qlo[i]) > 1e-11 * mid) break;
    r_match = probe[i];
  }

  // Far field: integrate the full equation inward from kOuterRadius starting
  // on c K0; inward integration tracks the decaying solution. c is fixed by
  // continuity with the outward trajectory at r_match.
  const double q_match = trajectory_at(a, {r_match}).at(0);
  auto inward = [&](double c, const std::vector<double>& radii) {
    // radii descending, all in [r_match, kOuterRadius]
    std::vector<double> times;
    times.push_back(kOuterRadius);
    times.insert(times.end(), radii.begin(), radii.end());
    State y{c * boost::math::cyl_bessel_k(0.0, kOuterRadius), -c * boost::math::cyl_bessel_k(1.0, kOuterRadius)};
    std::vector<double> out;
    odeint::integrate_times(make_stepper(1e-300), RadialOde{}, y, times.begin(), times.end(), -1e-3,
                            [&](const State& st, double rr) {
                              if (rr < kOuterRadius) out.push_back(st[0]);
                            });
    return out;
  };
  double c = q_match / boost::math::cyl_bessel_k(0.0, r_match);
  for (int it = 0; it < 8; ++it) {
    const double q = inward(c, {r_match}).at(0);
    const double next = c * q_match / q;
    if (std::abs(next - c) <= 1e-15 * c) break;
    c = next;
  }

  const auto r = grid->r();
  std::vector<double> inner, outer;
  for (double rk : r) {
    if (rk <= r_match)
      inner.push_back(rk);
    else if (rk < kOuterRadius)
      outer.push_back(rk);
  }
  const auto qin = trajectory_at(a, inner);
  std::vector<double> outer_desc(outer.rbegin(), outer.rend());
  const auto qout_desc = outer.empty() ? std::vector<double>{} : inward(c, outer_desc);

  GroundState gs;
  gs.method = GroundState::Method::Shooting;
  gs.profile = RadialField(grid);
  const std::size_t n_in = qin.size(), n_out = qout_desc.size();
  for (int k = 0; k < grid->size(); ++k) {
    const auto kk = static_cast<std::size_t>(k);
    double q;
    if (kk < n_in)
      q = qin[kk];
    else if (kk < n_in + n_out)
      q = qout_desc[n_out - 1 - (kk - n_in)];
    else
      q = c * boost::math::cyl_bessel_k(0.0, r[k]);
    gs.profile.values[k] = q;
  }
  fill_observables(gs);
  gs.q0 = a;
  return gs;
}

GroundState gradient_flow_ground_state(GridPtr grid, const FlowOptions& opts) {
  if (grid->radius() < 15.0) throw std::invalid_argument("gradient flow needs R >= 15");
  RadialField f = opts.seed.grid ? opts.seed : sample(grid, [](double r) { return cplx(std::exp(-0.5 * r * r), 0.0); });
  if (f.grid->size() != grid->size() || f.grid->radius() != grid->radius())
    throw std::invalid_argument("seed lives on a different grid");
  double seed_norm = 0.0;
  for (const auto& v : f.values) seed_norm = std::max(seed_norm, std::abs(v));
  if (seed_norm == 0.0) throw std::invalid_argument("gradient flow seed must be nonzero");

  // Renormalized fixed-point flow (1 - Delta) f = f^3 in frequency space:
  // f <- s^{3/2} (1 - Delta)^{-1} f^3 with s = <(1-Delta) f, f> / <f^3, f>.
  // The factor s removes the neutral scaling direction of the critical
  // problem and pins the frequency of the fixed point at 1.
  const int n = grid->size();
  const auto xi = grid->xi();
  const auto wx = grid->spectral_weights();
  for (auto& v : f.values) v = std::abs(v);

  // roundoff floor of the spectral Laplacian residual on this grid
  const double floor_tol = 64.0 * std::numeric_limits<double>::epsilon() * grid->kmax() * grid->kmax() * 2.3;
  const double tol = std::max(opts.tol, floor_tol);

  GroundState gs;
  gs.method = GroundState::Method::GradientFlow;
  double residual = INFINITY;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const auto F = hankel_forward(f);
    RadialField cube(grid);
    for (int k = 0; k < n; ++k) cube.values[k] = std::norm(f.values[k]) * f.values[k];
    const auto C = hankel_forward(cube);
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n; ++k) {
      num += wx[k] * (1.0 + xi[k] * xi[k]) * std::norm(F.coeffs[k]);
      den += wx[k] * std::real(std::conj(C.coeffs[k]) * F.coeffs[k]);
    }
    if (!(den > 0.0) || !std::isfinite(num)) throw NumericFailure("gradient flow degenerated", residual);
    const double s = num / den;
    SpectralField next(grid);
    for (int k = 0; k < n; ++k) next.coeffs[k] = std::pow(s, 1.5) * C.coeffs[k] / (1.0 + xi[k] * xi[k]);
    f = hankel_inverse(next);
    for (auto& v : f.values) v = v.real();
    residual = ground_state_residual(f, 0.5 * grid->radius());
    if (residual <= tol && std::abs(s - 1.0) <= tol) break;
  }
  if (!(residual <= tol)) throw NumericFailure("gradient flow did not converge", residual);
  gs.profile = f;
  gs.iterations = it + 1;
  fill_observables(gs);
  return gs;
}

}  // namespace nlslab
