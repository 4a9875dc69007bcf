#include "nlslab/profiles.hpp"

#include "nlslab/bump.hpp"
#include "nlslab/diagnostics.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlslab {

namespace {

constexpr double kRenormTolerance = 1e-3;

/// Range [k0, k1) of nonzero coefficients.
std::pair<int, int> support(const SpectralField& F) {
  int k0 = 0, k1 = static_cast<int>(F.coeffs.size());
  while (k0 < k1 && F.coeffs[k0] == cplx(0.0)) ++k0;
  while (k1 > k0 && F.coeffs[k1 - 1] == cplx(0.0)) --k1;
  return {k0, k1};
}

double l4_from_history(const FreeHistory& h, std::span<const double> tw, const RadialGrid& g) {
  const auto w = g.weights();
  double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::size_t j = 0; j < h.t.size(); ++j) {
    const auto u = h.at(j);
    double s = 0.0;
    for (int k = 0; k < h.n; ++k) {
      const double m = std::norm(u[k]);
      s += w[k] * m * m;
    }
    acc += tw[j] * s;
  }
  return acc;
}

/// Octave-wide dyadic piece chi(xi/M) - chi(2 xi/M), chi = 1 below 1 and 0
/// above 2, supported in (M/2, 2M); the pieces sum to the identity.
SpectralField octave_piece(const SpectralField& F, double M) {
  SpectralField out = F;
  const auto xi = F.grid->xi();
  for (int k = 0; k < F.grid->size(); ++k)
    out.coeffs[k] *= smooth_cutoff(xi[k] / M, 1.0, 2.0) - smooth_cutoff(2.0 * xi[k] / M, 1.0, 2.0);
  return out;
}

}  // namespace

std::vector<double> simpson_nodes(double t0, double t1, int samples) {
  int panels = std::max(2, samples - 1);
  if (panels % 2) ++panels;
  std::vector<double> t(panels + 1);
  for (int i = 0; i <= panels; ++i) t[i] = t0 + (t1 - t0) * i / panels;
  return t;
}

std::vector<double> simpson_weights(double t0, double t1, int samples) {
  int panels = std::max(2, samples - 1);
  if (panels % 2) ++panels;
  const double h = (t1 - t0) / panels;
  std::vector<double> w(panels + 1);
  for (int i = 0; i <= panels; ++i) w[i] = h / 3.0 * (i == 0 || i == panels ? 1.0 : (i % 2 ? 4.0 : 2.0));
  return w;
}

FreeHistory free_history(const SpectralField& F, std::span<const double> times) {
  const auto& g = *F.grid;
  const int n = g.size();
  FreeHistory h;
  h.n = n;
  h.t.assign(times.begin(), times.end());
  h.values.assign(h.t.size() * n, cplx(0.0));
  const auto [k0, k1] = support(F);
  const int m = k1 - k0;
  if (m <= 0 || h.t.empty()) return h;

  const auto xi2 = g.xi_squared();
  const auto sx = g.freq_scale();
  const auto sr = g.space_scale();
  CVec block(h.t.size() * m);
  for (std::size_t j = 0; j < h.t.size(); ++j)
    for (int k = 0; k < m; ++k) {
      const double phase = -h.t[j] * xi2[k0 + k];
      block[j * m + k] = F.coeffs[k0 + k] * sx[k0 + k] * cplx(std::cos(phase), std::sin(phase));
    }
  kernels::matmat_columns(g.transform_matrix(), n, k0, m, block, h.values);
  for (std::size_t j = 0; j < h.t.size(); ++j)
    for (int k = 0; k < n; ++k) h.values[j * n + k] /= sr[k];
  return h;
}

double free_strichartz_l4(const RadialField& f, double t0, double t1, int samples) {
  if (!(t1 > t0)) throw std::invalid_argument("empty time interval");
  const auto t = simpson_nodes(t0, t1, samples);
  const auto w = simpson_weights(t0, t1, samples);
  return l4_from_history(free_history(hankel_forward(f), t), w, *f.grid);
}

Bubble find_bubble(const RadialField& phi, double t_begin, double t_end, double eta, const BubbleOptions& opts) {
  if (!(t_end > t_begin)) throw std::invalid_argument("empty time interval");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (opts.time_samples < 3 || !(opts.ball_constant > 0.0)) throw std::invalid_argument("bad bubble options");
  const auto& g = *phi.grid;
  const auto times = simpson_nodes(t_begin, t_end, opts.time_samples);
  const auto tw = simpson_weights(t_begin, t_end, opts.time_samples);
  const auto F = hankel_forward(phi);

  Bubble b;
  b.l4 = l4_from_history(free_history(F, times), tw, g);
  if (b.l4 < eta) throw HypothesisNotMet("free L4 norm on the interval is below eta");

  // dyadic pieces whose band fits under kmax
  double best = -1.0;
  SpectralField best_piece;
  const double m_lo = std::exp2(std::floor(std::log2(g.xi()[0])));
  for (double M = m_lo; 2.0 * M <= g.kmax(); M *= 2.0) {
    const auto piece = octave_piece(F, M);
    const double l4 = l4_from_history(free_history(piece, times), tw, g);
    if (l4 > best) {
      best = l4;
      best_piece = piece;
      b.frequency = M;
    }
  }

  const auto h = free_history(best_piece, times);
  double peak = -1.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const auto u = h.at(j);
    for (int k = 0; k < h.n; ++k)
      if (std::abs(u[k]) > peak) {
        peak = std::abs(u[k]);
        b.t0 = times[j];
        b.peak_radius = g.r()[k];
      }
  }

  const double M = b.frequency;
  b.radius = opts.ball_constant / M;
  b.mass_in_ball = mass_in_ball(free_evolve(phi, b.t0), b.radius);
  b.window_begin = std::max(t_begin, b.t0 - 1.0 / (M * M));
  b.window_end = std::min(t_end, b.t0 + 1.0 / (M * M));
  return b;
}

ProfileDecomposition extract_profiles(const std::vector<RadialField>& sequence, int max_J, double tol,
                                      const ProfileOptions& opts) {
  if (sequence.empty()) throw std::invalid_argument("empty sequence");
  for (const auto& f : sequence)
    if (f.grid != sequence.front().grid) throw std::invalid_argument("sequence members live on different grids");
  if (max_J < 0 || !(tol > 0.0)) throw std::invalid_argument("bad extraction limits");
  if (!(opts.ball_constant > 0.0) || !(opts.frequency_ratio > 1.0)) throw std::invalid_argument("bad extraction options");

  const auto& u = sequence.back();
  const auto& g = *u.grid;
  const auto r = g.r();
  const auto w = g.weights();
  ProfileDecomposition out;
  out.remainder = u;
  const double total = mass(u);

  BubbleOptions bopts;
  bopts.time_samples = opts.time_samples;
  for (int j = 0; j < max_J; ++j) {
    const double l4 = free_strichartz_l4(out.remainder, opts.t_begin, opts.t_end, opts.time_samples);
    if (l4 < tol) break;
    Bubble b;
    try {
      b = find_bubble(out.remainder, opts.t_begin, opts.t_end, tol, bopts);
    } catch (const HypothesisNotMet&) {
      break;
    }
    // local piece: high frequencies inside the ball at the concentration time
    auto V = hankel_forward(free_evolve(out.remainder, b.t0));
    const double cut = b.frequency / opts.frequency_ratio;
    for (int k = 0; k < g.size(); ++k)
      if (g.xi()[k] <= cut) V.coeffs[k] = 0.0;
    auto piece = hankel_inverse(V);
    const double rho = opts.ball_constant / b.frequency;
    for (int k = 0; k < g.size(); ++k)
      if (r[k] > rho) piece.values[k] = 0.0;
    out.remainder = out.remainder - free_evolve(piece, -b.t0);

    Profile p;
    p.t = b.t0;
    p.mass = mass(piece);
    double m2 = 0.0, peak = 0.0;
    cplx at_peak = 1.0;
    for (int k = 0; k < g.size(); ++k) {
      const double a = std::norm(piece.values[k]);
      m2 += w[k] * r[k] * r[k] * a;
      if (a > peak) {
        peak = a;
        at_peak = piece.values[k];
      }
    }
    const double lambda = p.mass > 0.0 ? std::sqrt(m2 / p.mass) : 1.0;
    p.g = GroupElement{std::arg(at_peak), {0, 0}, {0, 0}, lambda, true};
    try {
      p.phi = apply_group_element(GroupElement{-p.g.theta, {0, 0}, {0, 0}, 1.0 / lambda, true}, piece, kRenormTolerance);
    } catch (const std::out_of_range&) {
      // the unit-scale copy does not fit on the grid; keep the piece as found
      p.phi = piece;
      p.g = GroupElement::identity();
    }
    out.profiles.push_back(std::move(p));
  }
  out.remainder_l4 = free_strichartz_l4(out.remainder, opts.t_begin, opts.t_end, opts.time_samples);
  out.mass_decoupling_gap = std::abs(total - out.profile_mass() - mass(out.remainder));
  return out;
}

}  // namespace nlslab
