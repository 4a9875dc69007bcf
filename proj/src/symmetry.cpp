#include "nlslab/symmetry.hpp"

#include "nlslab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlslab {

namespace {

bool finite(const std::array<double, 2>& v) { return std::isfinite(v[0]) && std::isfinite(v[1]); }

template <class Field>
void rebuild_series(BasicTrajectory<Field>& traj) {
  traj.series.clear();
  double l4_cum = 0.0, prev_t = 0.0, prev_l4 = 0.0;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& s = traj.snapshots[i];
    StepRecord rec;
    rec.t = s.t;
    rec.mass = mass(s.u);
    rec.energy = energy(s.u, traj.mu);
    const double l4 = quartic_integral(s.u);
    if (i > 0) {
      rec.dt = s.t - prev_t;
      l4_cum += 0.5 * rec.dt * (prev_l4 + l4);
    }
    rec.l4_cum = l4_cum;
    if constexpr (std::is_same_v<Field, RadialField>) {
      rec.linf = sup_norm(s.u);
    } else {
      for (const auto& z : s.u.values) rec.linf = std::max(rec.linf, std::abs(z));
    }
    traj.series.push_back(rec);
    prev_t = s.t;
    prev_l4 = l4;
  }
}

}  // namespace

void validate(const GroupElement& g) {
  if (!(g.lambda > 0.0) || !std::isfinite(g.lambda)) throw std::invalid_argument("lambda must be positive");
  if (!std::isfinite(g.theta) || !finite(g.xi0) || !finite(g.x0))
    throw std::invalid_argument("group element has non-finite entries");
  if (g.radial && g.has_shifts()) throw std::invalid_argument("radial group element with nonzero shifts");
}

RadialField apply_group_element(const GroupElement& g, const RadialField& f, double tail_tolerance) {
  validate(g);
  if (!g.radial || g.has_shifts()) throw std::invalid_argument("radial backend accepts only radial group elements");
  const cplx rot = std::polar(1.0, g.theta);
  const auto& grid = *f.grid;
  const double lambda = g.lambda;
  if (lambda == 1.0) {
    RadialField out = f;
    for (auto& z : out.values) z *= rot;
    return out;
  }
  if (lambda > 1.0) {
    // spreading: sample the band-limited interpolant at r / lambda
    if (spatial_tail_fraction(f, grid.radius() / lambda) > tail_tolerance)
      throw std::out_of_range("dilated field leaves the radial domain");
    std::vector<double> radii(grid.r().begin(), grid.r().end());
    for (auto& r : radii) r /= lambda;
    RadialField out(f.grid, evaluate_at(hankel_forward(f), radii));
    for (auto& z : out.values) z *= rot / lambda;
    return out;
  }
  // concentrating: sample the spectrum at lambda * xi
  if (spectral_tail_fraction(hankel_forward(f), grid.resolved_kmax() * lambda) > tail_tolerance)
    throw std::out_of_range("concentrated field exceeds the resolved band");
  std::vector<double> xis(grid.xi().begin(), grid.xi().end());
  for (auto& x : xis) x *= lambda;
  SpectralField F(f.grid, spectrum_at(f, xis));
  for (auto& z : F.coeffs) z *= rot * lambda;
  return hankel_inverse(F);
}

CartesianField apply_group_element(const GroupElement& g, const CartesianField& f) {
  validate(g);
  if (g.lambda != 1.0) throw std::out_of_range("Cartesian backend supports lambda = 1 only");
  const double unit = 2.0 * std::numbers::pi / f.L;
  for (double k : g.xi0) {
    const double m = k / unit;
    if (std::abs(m - std::round(m)) > 1e-9) throw std::invalid_argument("boost is not on the box's frequency lattice");
  }
  CartesianField out = (g.x0[0] != 0.0 || g.x0[1] != 0.0) ? fourier_shift(f, g.x0) : f;
  for (int iy = 0; iy < f.n; ++iy)
    for (int ix = 0; ix < f.n; ++ix)
      out.at(ix, iy) *= std::polar(1.0, g.theta + g.xi0[0] * f.coord(ix) + g.xi0[1] * f.coord(iy));
  return out;
}

Trajectory transform_trajectory(const GroupElement& g, const Trajectory& traj) {
  validate(g);
  if (!g.radial || g.has_shifts()) throw std::invalid_argument("radial trajectories need a radial group element");
  const double l2 = g.lambda * g.lambda;
  Trajectory out;
  out.mu = traj.mu;
  out.termination = traj.termination;
  out.resolution_limited = traj.resolution_limited;
  out.message = traj.message;
  for (const auto& s : traj.snapshots) out.snapshots.push_back({l2 * s.t, apply_group_element(g, s.u)});
  for (auto rec : traj.series) {
    rec.t *= l2;
    rec.dt *= l2;
    rec.energy /= l2;
    rec.linf /= g.lambda;
    out.series.push_back(rec);
  }
  if (traj.blowup) {
    auto b = *traj.blowup;
    b.t_star *= l2;
    b.window_begin *= l2;
    b.window_end *= l2;
    b.log_prefactor -= (1.0 + 2.0 * b.exponent) * std::log(g.lambda);
    out.blowup = b;
  }
  return out;
}

CartesianTrajectory transform_trajectory(const GroupElement& g, const CartesianTrajectory& traj) {
  validate(g);
  if (g.lambda != 1.0) throw std::out_of_range("Cartesian backend supports lambda = 1 only");
  const double xi_sq = g.xi0[0] * g.xi0[0] + g.xi0[1] * g.xi0[1];
  CartesianTrajectory out;
  out.mu = traj.mu;
  out.termination = traj.termination;
  out.message = traj.message;
  for (const auto& s : traj.snapshots) {
    GroupElement gt = g;
    gt.radial = false;
    gt.theta = g.theta - s.t * xi_sq;
    gt.x0 = {g.x0[0] + 2.0 * g.xi0[0] * s.t, g.x0[1] + 2.0 * g.xi0[1] * s.t};
    out.snapshots.push_back({s.t, apply_group_element(gt, s.u)});
  }
  // |T_g u(t)| is a translate of |u(t)|; only the energy picks up the boost
  const auto p = traj.snapshots.empty() ? std::array<double, 2>{0, 0} : momentum(traj.snapshots.front().u);
  const double shift = g.xi0[0] * p[0] + g.xi0[1] * p[1];
  out.series = traj.series;
  for (auto& rec : out.series) rec.energy += shift + 0.5 * xi_sq * rec.mass;
  return out;
}

Trajectory time_reverse(const Trajectory& traj) {
  Trajectory out;
  out.mu = traj.mu;
  out.resolution_limited = traj.resolution_limited;
  out.message = traj.message;
  for (auto it = traj.snapshots.rbegin(); it != traj.snapshots.rend(); ++it) {
    RadialField u = it->u;
    for (auto& z : u.values) z = std::conj(z);
    out.snapshots.push_back({-it->t, std::move(u)});
  }
  const double total = traj.series.empty() ? 0.0 : traj.series.back().l4_cum;
  const std::size_t m = traj.series.size();
  for (std::size_t j = 0; j < m; ++j) {
    StepRecord rec = traj.series[m - 1 - j];
    rec.t = -rec.t;
    rec.dt = j == 0 ? 0.0 : traj.series[m - j].dt;
    rec.l4_cum = total - rec.l4_cum;
    out.series.push_back(rec);
  }
  switch (traj.termination) {
    case Termination::BlowupForward:
      out.termination = Termination::BlowupBackward;
      break;
    case Termination::BlowupBackward:
      out.termination = Termination::BlowupForward;
      break;
    default:
      out.termination = traj.termination;
  }
  if (traj.blowup) {
    auto b = *traj.blowup;
    b.t_star = -b.t_star;
    b.window_begin = -traj.blowup->window_end;
    b.window_end = -traj.blowup->window_begin;
    out.blowup = b;
  }
  return out;
}

Trajectory time_translate(const Trajectory& traj, double t0) {
  if (!std::isfinite(t0)) throw std::invalid_argument("time shift must be finite");
  Trajectory out = traj;
  for (auto& s : out.snapshots) s.t -= t0;
  for (auto& rec : out.series) rec.t -= t0;
  if (out.blowup) {
    out.blowup->t_star -= t0;
    out.blowup->window_begin -= t0;
    out.blowup->window_end -= t0;
  }
  return out;
}

RadialField pseudoconformal_snapshot(const RadialField& u, double s) {
  if (s == 0.0 || !std::isfinite(s)) throw std::invalid_argument("pseudoconformal map is singular at t = 0");
  const double t = -1.0 / s;
  const auto& grid = *u.grid;
  if (grid.radius() / (2.0 * std::abs(t)) > grid.resolved_kmax())
    throw std::out_of_range("pseudoconformal chirp is not resolved on this grid");
  RadialField v = apply_group_element(GroupElement::scaling(std::abs(t)), u);
  const auto r = grid.r();
  for (int k = 0; k < grid.size(); ++k) v.values[k] *= std::polar(1.0, r[k] * r[k] / (4.0 * t));
  return v;
}

Trajectory pseudoconformal(const Trajectory& traj) {
  if (traj.snapshots.empty()) return traj;
  if (traj.t_begin() <= 0.0 && traj.t_end() >= 0.0)
    throw std::invalid_argument("pseudoconformal map needs an interval avoiding t = 0");
  Trajectory out;
  out.mu = traj.mu;
  out.termination = Termination::ReachedEnd;
  out.message = "pseudoconformal image";
  for (const auto& s : traj.snapshots) out.snapshots.push_back({-1.0 / s.t, pseudoconformal_snapshot(s.u, s.t)});
  rebuild_series(out);
  return out;
}

RadialField pc_soliton(const GroundState& q, GridPtr g, double t) {
  if (t == 0.0 || !std::isfinite(t)) throw std::invalid_argument("pc soliton is singular at t = 0");
  const double a = std::abs(t);
  std::vector<double> rho(g->r().begin(), g->r().end());
  for (auto& x : rho) x /= a;
  const CVec qv = evaluate_at(hankel_forward(q.profile), rho);
  RadialField v(g);
  const auto r = g->r();
  for (int k = 0; k < g->size(); ++k)
    v.values[k] = qv[k].real() / a * std::polar(1.0, r[k] * r[k] / (4.0 * t) - 1.0 / t);
  return v;
}

}  // namespace nlslab
