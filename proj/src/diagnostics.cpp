#include "nlslab/diagnostics.hpp"

#include "nlslab/bump.hpp"
#include "nlslab/observables.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace nlslab {

namespace {

constexpr double kTimeEps = 1e-12;

double cumulative_at(const std::vector<StepRecord>& series, double t) {
  auto it = std::lower_bound(series.begin(), series.end(), t,
                             [](const StepRecord& r, double v) { return r.t < v; });
  if (it == series.end()) return series.back().l4_cum;
  if (it == series.begin() || it->t == t) return it->l4_cum;
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double s = (t - a.t) / (b.t - a.t);
  return a.l4_cum + s * (b.l4_cum - a.l4_cum);
}

/// Smallest abscissa beyond which at most `level` of the density lies, the
/// tail being interpolated linearly between nodes (tail(0) = total).
double tail_threshold(std::span<const double> nodes, const std::vector<double>& density, double level) {
  const int n = static_cast<int>(nodes.size());
  std::vector<double> tail(n);
  double acc = 0.0;
  for (int k = n - 1; k >= 0; --k) {
    tail[k] = acc;
    acc += density[k];
  }
  double prev_x = 0.0, prev_tail = acc;
  for (int k = 0; k < n; ++k) {
    if (tail[k] <= level) {
      if (prev_tail <= level) return prev_x;
      const double s = (prev_tail - level) / (prev_tail - tail[k]);
      return prev_x + s * (nodes[k] - prev_x);
    }
    prev_x = nodes[k];
    prev_tail = tail[k];
  }
  return nodes[n - 1];
}

struct Tails {
  double n_freq;
  double r_space;
};

struct Densities {
  std::vector<double> freq, space;
  double mass;
};

Densities densities(const RadialField& u) {
  const auto& g = *u.grid;
  const auto F = hankel_forward(u);
  const auto w = g.weights();
  const auto wxi = g.spectral_weights();
  Densities d;
  d.freq.resize(g.size());
  d.space.resize(g.size());
  for (int k = 0; k < g.size(); ++k) {
    d.freq[k] = wxi[k] * std::norm(F.coeffs[k]);
    d.space[k] = w[k] * std::norm(u.values[k]);
  }
  d.mass = std::accumulate(d.space.begin(), d.space.end(), 0.0);
  return d;
}

Tails tails(const RadialGrid& g, const Densities& d, double eta) {
  const double fm = std::accumulate(d.freq.begin(), d.freq.end(), 0.0);
  return {tail_threshold(g.xi(), d.freq, eta * fm), tail_threshold(g.r(), d.space, eta * d.mass)};
}

double snap_to_lattice(double N) { return std::exp2(std::ceil(8.0 * std::log2(N) - 1e-9) / 8.0); }

}  // namespace

// -- spacetime norms ------------------------------------------------------------------

double strichartz_accumulate(const Trajectory& traj, double t0, double t1) {
  if (traj.series.empty()) return 0.0;
  const double lo = traj.series.front().t, hi = traj.series.back().t;
  const double eps = kTimeEps * std::max(1.0, std::abs(hi - lo));
  if (!(t0 <= t1) || t0 < lo - eps || t1 > hi + eps)
    throw std::invalid_argument("interval outside the trajectory");
  return cumulative_at(traj.series, std::min(t1, hi)) - cumulative_at(traj.series, std::max(t0, lo));
}

double strichartz_accumulate(const Trajectory& traj) {
  return traj.series.empty() ? 0.0 : traj.series.back().l4_cum - traj.series.front().l4_cum;
}

ScatteringReport scattering_test(const Trajectory& traj, const ScatteringOptions& opts) {
  if (traj.termination != Termination::ReachedEnd)
    throw std::invalid_argument("scattering test needs a run that reached its end, got " + to_string(traj.termination));
  if (traj.snapshots.empty()) throw std::invalid_argument("empty trajectory");
  const double t_end = traj.t_end(), t_begin = traj.t_begin();
  const double tail = opts.tail_window > 0.0 ? opts.tail_window : 0.25 * (t_end - t_begin);
  const double start = std::max(t_begin, t_end - tail);

  ScatteringReport rep;
  std::vector<RadialField> pulled;
  for (const auto& s : traj.snapshots)
    if (s.t >= start - kTimeEps) pulled.push_back(free_evolve(s.u, -s.t));
  rep.tail_snapshots = static_cast<int>(pulled.size());
  for (std::size_t i = 0; i < pulled.size(); ++i)
    for (std::size_t j = i + 1; j < pulled.size(); ++j)
      rep.cauchy_gap = std::max(rep.cauchy_gap, l2_distance(pulled[i], pulled[j]));
  rep.u_plus = pulled.back();

  rep.tail_l4 = strichartz_accumulate(traj, start, t_end);
  const double before = std::max(t_begin, start - (t_end - start));
  rep.previous_l4 = strichartz_accumulate(traj, before, start);
  rep.l4_decaying = rep.tail_l4 <= rep.previous_l4;
  rep.scatters = rep.cauchy_gap <= opts.tolerance && rep.l4_decaying;
  return rep;
}

// -- scales ---------------------------------------------------------------------------

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  LogLogFit fit;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  fit.points = static_cast<int>(lx.size());
  if (fit.points < 2) return fit;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / fit.points;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / fit.points;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < fit.points; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

ScaleSeries scale_functions(std::span<const Snapshot<RadialField>> snapshots, double eta) {
  if (!(eta > 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in (0, 0.5)");
  const std::array<double, 3> levels{0.1, 0.01, 0.001};
  const std::size_t m = snapshots.size();
  ScaleSeries s;
  s.eta = eta;
  s.t.resize(m);
  s.N.resize(m);
  s.x.assign(m, 0.0);
  s.xi.assign(m, 0.0);
  s.n_freq.resize(m);
  s.r_space.resize(m);
  std::vector<std::array<Tails, 3>> at_levels(m);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < m; ++i) {
    const auto& u = snapshots[i].u;
    const auto d = densities(u);
    s.t[i] = snapshots[i].t;
    if (d.mass == 0.0) {
      s.n_freq[i] = s.r_space[i] = 0.0;
      s.N[i] = u.grid->kmax();
      continue;
    }
    const auto tl = tails(*u.grid, d, eta);
    s.n_freq[i] = tl.n_freq;
    s.r_space[i] = tl.r_space;
    double N = tl.r_space > 0.0 ? std::sqrt(tl.n_freq / tl.r_space) : u.grid->kmax();
    N = N > 0.0 ? snap_to_lattice(N) : u.grid->xi()[0];
    s.N[i] = std::min(N, u.grid->kmax());
    for (int l = 0; l < 3; ++l) at_levels[i][l] = tails(*u.grid, d, levels[l]);
  }

  for (int l = 0; l < 3; ++l) {
    double c = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      c = std::max({c, at_levels[i][l].n_freq / s.N[i], at_levels[i][l].r_space * s.N[i]});
    s.c_hat.emplace_back(levels[l], c);
  }
  return s;
}

ScaleSeries scale_functions(const Trajectory& traj, double eta) { return scale_functions(traj.snapshots, eta); }

LogLogFit scale_exponent(const ScaleSeries& s, double t_star) {
  std::vector<double> tau, N;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (std::abs(t_star - s.t[i]) > 0.0) {
      tau.push_back(std::abs(t_star - s.t[i]));
      N.push_back(s.N[i]);
    }
  return fit_loglog(tau, N);
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::SolitonLike: return "soliton-like";
    case Scenario::Cascade: return "cascade";
    case Scenario::SelfSimilar: return "self-similar";
    case Scenario::Inconclusive: return "inconclusive";
  }
  return "?";
}

ScenarioReport classify_scenario(const ScaleSeries& s) {
  if (s.size() < 50) throw std::invalid_argument("scenario classification needs at least 50 samples");
  ScenarioReport rep;
  const auto [lo, hi] = std::minmax_element(s.N.begin(), s.N.end());
  rep.max_min_ratio = *hi / *lo;
  std::vector<double> sorted = s.N;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  rep.median = sorted[sorted.size() / 2];
  if (std::all_of(s.t.begin(), s.t.end(), [](double t) { return t > 0.0; })) rep.time_fit = fit_loglog(s.t, s.N);

  if (rep.max_min_ratio <= 4.0) {
    rep.label = Scenario::SolitonLike;
  } else if (rep.time_fit.points >= 2 && rep.time_fit.slope >= -0.6 && rep.time_fit.slope <= -0.4 &&
             rep.time_fit.r2 >= 0.9) {
    rep.label = Scenario::SelfSimilar;
  } else if (*hi <= 4.0 * rep.median && s.N.front() < 0.25 * rep.median && s.N.back() < 0.25 * rep.median) {
    rep.label = Scenario::Cascade;
  }
  return rep;
}

ScaleSeries from_blowup_end(const ScaleSeries& s, double t_star) {
  ScaleSeries out;
  out.eta = s.eta;
  out.c_hat = s.c_hat;
  for (std::size_t k = s.size(); k-- > 0;) {
    if (!(s.t[k] < t_star)) continue;
    out.t.push_back(t_star - s.t[k]);
    out.N.push_back(s.N[k]);
    out.x.push_back(s.x[k]);
    out.xi.push_back(s.xi[k]);
    out.n_freq.push_back(s.n_freq[k]);
    out.r_space.push_back(s.r_space[k]);
  }
  return out;
}

// -- virial ---------------------------------------------------------------------------

double virial(const RadialField& f, double Rcut) {
  if (!(Rcut > 0.0)) throw std::invalid_argument("virial cutoff must be positive");
  const auto& g = *f.grid;
  const auto fr = radial_derivative(f);
  const auto r = g.r();
  const auto w = g.weights();
  double acc = 0.0;
  for (int k = 0; k < g.size(); ++k)
    acc += w[k] * r[k] * smooth_cutoff(r[k] / Rcut, 1.0, 2.0) * std::imag(std::conj(f.values[k]) * fr.values[k]);
  return 2.0 * acc;
}

std::array<double, 4> virial_rhs(const RadialField& f, double Rcut, double mu) {
  if (!(Rcut > 0.0)) throw std::invalid_argument("virial cutoff must be positive");
  const auto& g = *f.grid;
  const auto fr = radial_derivative(f);
  const auto r = g.r();
  const auto w = g.weights();
  std::array<double, 4> out{8.0 * energy(f, mu), 0.0, 0.0, 0.0};
  const double R = Rcut;
  for (int k = 0; k < g.size(); ++k) {
    const double s = r[k] / R;
    const auto [p0, p1, p2, p3] = smooth_cutoff_derivatives(s, 1.0, 2.0);
    const double m2 = std::norm(f.values[k]);
    out[1] -= w[k] * (3.0 * p1 / (R * r[k]) + 5.0 * p2 / (R * R) + r[k] * p3 / (R * R * R)) * m2;
    out[2] += 4.0 * w[k] * (p0 - 1.0 + s * p1) * std::norm(fr.values[k]);
    out[3] += mu * w[k] * (2.0 * p0 - 2.0 + s * p1) * m2 * m2;
  }
  return out;
}

VirialReport virial_identity(const Trajectory& traj, double t, double Rcut, double mu) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 5) throw std::invalid_argument("virial identity needs at least five snapshots");
  std::size_t i = 0;
  double best = INFINITY;
  for (std::size_t k = 0; k < snaps.size(); ++k)
    if (std::abs(snaps[k].t - t) < best) {
      best = std::abs(snaps[k].t - t);
      i = k;
    }
  const double h = i + 1 < snaps.size() ? snaps[i + 1].t - snaps[i].t : 0.0;
  if (best > 1e-9 * std::max(1.0, std::abs(t))) throw std::invalid_argument("t is not a snapshot time");
  if (i < 2 || i + 2 >= snaps.size()) throw std::invalid_argument("t is a boundary snapshot");
  for (std::size_t k = i - 2; k < i + 2; ++k)
    if (std::abs(snaps[k + 1].t - snaps[k].t - h) > 1e-8 * h)
      throw std::invalid_argument("snapshots around t are not uniformly spaced");

  VirialReport rep;
  rep.R = Rcut;
  rep.t = snaps[i].t;
  rep.times.resize(snaps.size());
  rep.Ma.resize(snaps.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    rep.times[k] = snaps[k].t;
    rep.Ma[k] = virial(snaps[k].u, Rcut);
  }
  const auto& M = rep.Ma;
  rep.dMa_dt_fd = (M[i - 2] - 8.0 * M[i - 1] + 8.0 * M[i + 1] - M[i + 2]) / (12.0 * h);
  rep.rhs_terms = virial_rhs(snaps[i].u, Rcut, mu);
  rep.identity_gap = std::abs(rep.dMa_dt_fd - rep.rhs());
  return rep;
}

// -- concentration --------------------------------------------------------------------

double mass_in_ball(const RadialField& f, double rho) {
  const auto& g = *f.grid;
  rho = std::min(rho, g.radius());
  if (!(rho > 0.0)) return 0.0;
  using Rule = boost::math::quadrature::gauss<double, 10>;
  const auto& abscissa = Rule::abscissa();
  const auto& weights = Rule::weights();

  // panel edges at the grid nodes, the last panel clipped at rho
  std::vector<double> edges{0.0};
  for (double r : g.r()) {
    if (r >= rho) break;
    edges.push_back(r);
  }
  edges.push_back(rho);

  std::vector<double> pts, wts;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    if (half <= 0.0) continue;
    for (std::size_t j = 0; j < abscissa.size(); ++j) {
      const double x = abscissa[j];
      for (double sgn : {-1.0, 1.0}) {
        if (x == 0.0 && sgn > 0.0) continue;
        pts.push_back(mid + sgn * half * x);
        wts.push_back(half * weights[j]);
      }
    }
  }
  const auto vals = evaluate_at(hankel_forward(f), pts);
  double acc = 0.0;
  for (std::size_t j = 0; j < pts.size(); ++j) acc += wts[j] * pts[j] * std::norm(vals[j]);
  return 2.0 * std::numbers::pi * acc;
}

std::vector<ConcentrationPoint> concentration_mass(const Trajectory& traj, double c_window, std::size_t last) {
  if (!traj.blew_up() || !traj.blowup) throw std::invalid_argument("concentration needs a blowup run with a fitted T*");
  if (!(c_window > 0.0)) throw std::invalid_argument("window constant must be positive");
  const double t_star = traj.blowup->t_star;
  const auto& snaps = traj.snapshots;
  const std::size_t first = last == 0 || last >= snaps.size() ? 0 : snaps.size() - last;
  std::vector<ConcentrationPoint> out(snaps.size() - first);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = first; k < snaps.size(); ++k) {
    auto& p = out[k - first];
    p.t = snaps[k].t;
    p.radius = c_window * std::sqrt(std::abs(t_star - p.t));
    p.mass = mass_in_ball(snaps[k].u, p.radius);
  }
  double running = 0.0;
  for (auto& p : out) p.running_max = running = std::max(running, p.mass);
  return out;
}

}  // namespace nlslab
