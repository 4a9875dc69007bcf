#include "nlslab/evolution.hpp"

#include "nlslab/errors.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/observables.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace nlslab {

namespace {

struct Diagnostics {
  double mass = 0.0;
  double energy = 0.0;
  double linf = 0.0;
  double l4 = 0.0;
  double unresolved = 0.0;
  bool finite() const {
    return std::isfinite(mass) && std::isfinite(energy) && std::isfinite(linf) && std::isfinite(l4);
  }
};

constexpr double kYoshidaOuter = 1.3512071919596578;   // 1 / (2 - 2^{1/3})
constexpr double kYoshidaInner = -1.7024143839193153;  // -2^{1/3} / (2 - 2^{1/3})

template <class Stepper, class Field>
Field composed_step(Stepper& s, const Field& u, double dt, double mu, Scheme scheme) {
  if (scheme == Scheme::Strang) return s.strang(u, dt, mu);
  Field v = s.strang(u, kYoshidaOuter * dt, mu);
  v = s.strang(v, kYoshidaInner * dt, mu);
  return s.strang(v, kYoshidaOuter * dt, mu);
}

bool all_finite(std::span<const cplx> v) {
  for (const auto& z : v)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

class RadialStepper {
 public:
  explicit RadialStepper(GridPtr g) : grid_(std::move(g)) {}

  RadialField strang(const RadialField& u, double dt, double mu) const {
    RadialField v = u;
    kernels::cubic_phase(v.values, 0.5 * mu * dt);
    SpectralField F = hankel_forward(v);
    kernels::diagonal_phase(F.coeffs, grid_->xi_squared(), dt);
    v = hankel_inverse(F);
    kernels::cubic_phase(v.values, 0.5 * mu * dt);
    if (!all_finite(v.values)) throw NumericFailure("non-finite field after step");
    return v;
  }

  Diagnostics diagnose(const RadialField& u, double mu) const {
    const SpectralField F = hankel_forward(u);
    Diagnostics d;
    d.mass = mass(u);
    d.l4 = quartic_integral(u);
    d.energy = 0.5 * gradient_norm_sq(F) + 0.25 * mu * d.l4;
    for (const auto& z : u.values) d.linf = std::max(d.linf, std::abs(z));
    d.linf = std::max(d.linf, std::abs(value_at_origin(F)));
    d.unresolved = unresolved_spectral_fraction(F);
    return d;
  }

 private:
  GridPtr grid_;
};

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n >= 8 && (n & (n - 1)) == 0; }

class CartesianStepper {
 public:
  CartesianStepper(int n, double L) : n_(n), L_(L), buf_(static_cast<std::size_t>(n) * n), k2_(buf_.size()) {
    auto* data = reinterpret_cast<fftw_complex*>(buf_.data());
    {
      std::lock_guard lock(fftw_planner_mutex());
      fwd_ = fftw_plan_dft_2d(n, n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_2d(n, n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const double kx = wavenumber(ix), ky = wavenumber(iy);
        k2_[static_cast<std::size_t>(iy) * n + ix] = kx * kx + ky * ky;
      }
  }
  ~CartesianStepper() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  CartesianStepper(const CartesianStepper&) = delete;
  CartesianStepper& operator=(const CartesianStepper&) = delete;

  double wavenumber(int i) const {
    const int m = i < n_ / 2 ? i : i - n_;
    return 2.0 * std::numbers::pi * m / L_;
  }
  int index_frequency(int i) const { return i < n_ / 2 ? i : i - n_; }

  /// Spectrum of u (unnormalized forward DFT) left in buf_.
  const CVec& spectrum(const CartesianField& u) {
    std::copy(u.values.begin(), u.values.end(), buf_.begin());
    fftw_execute(fwd_);
    return buf_;
  }

  CartesianField strang(const CartesianField& u, double dt, double mu) {
    CartesianField v = u;
    kernels::cubic_phase(v.values, 0.5 * mu * dt);
    std::copy(v.values.begin(), v.values.end(), buf_.begin());
    fftw_execute(fwd_);
    kernels::diagonal_phase(buf_, k2_, dt);
    fftw_execute(bwd_);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    for (std::size_t i = 0; i < buf_.size(); ++i) v.values[i] = buf_[i] * scale;
    kernels::cubic_phase(v.values, 0.5 * mu * dt);
    if (!all_finite(v.values)) throw NumericFailure("non-finite field after step");
    return v;
  }

  CartesianField translate(const CartesianField& u, std::array<double, 2> x0) {
    std::copy(u.values.begin(), u.values.end(), buf_.begin());
    fftw_execute(fwd_);
    const double scale = 1.0 / (static_cast<double>(n_) * n_);
    for (int iy = 0; iy < n_; ++iy)
      for (int ix = 0; ix < n_; ++ix) {
        const double phase = -(wavenumber(ix) * x0[0] + wavenumber(iy) * x0[1]);
        buf_[static_cast<std::size_t>(iy) * n_ + ix] *= std::polar(scale, phase);
      }
    fftw_execute(bwd_);
    CartesianField v(u.n, u.L);
    std::copy(buf_.begin(), buf_.end(), v.values.begin());
    return v;
  }

  std::array<double, 2> momentum(const CartesianField& u) {
    const auto& U = spectrum(u);
    double px = 0.0, py = 0.0;
    for (int iy = 0; iy < n_; ++iy)
      for (int ix = 0; ix < n_; ++ix) {
        const double p = std::norm(U[static_cast<std::size_t>(iy) * n_ + ix]);
        px += wavenumber(ix) * p;
        py += wavenumber(iy) * p;
      }
    const double h = L_ / n_;
    const double scale = h * h / (static_cast<double>(n_) * n_);
    return {px * scale, py * scale};
  }

  double gradient_norm_sq(const CartesianField& u) {
    const auto& U = spectrum(u);
    double acc = 0.0;
    for (std::size_t i = 0; i < U.size(); ++i) acc += k2_[i] * std::norm(U[i]);
    const double h = L_ / n_;
    return acc * h * h / (static_cast<double>(n_) * n_);
  }

  double aliasing_fraction(const CartesianField& u) {
    const auto& U = spectrum(u);
    const double cut = 0.8 * (n_ / 2);
    double hi = 0.0, total = 0.0;
    for (int iy = 0; iy < n_; ++iy)
      for (int ix = 0; ix < n_; ++ix) {
        const double p = std::norm(U[static_cast<std::size_t>(iy) * n_ + ix]);
        total += p;
        if (std::abs(index_frequency(ix)) > cut || std::abs(index_frequency(iy)) > cut) hi += p;
      }
    return total > 0.0 ? hi / total : 0.0;
  }

  Diagnostics diagnose(const CartesianField& u, double mu) {
    Diagnostics d;
    d.mass = mass(u);
    d.l4 = quartic_integral(u);
    for (const auto& z : u.values) d.linf = std::max(d.linf, std::abs(z));
    const auto& U = spectrum(u);
    const double cut = 0.8 * (n_ / 2);
    double grad = 0.0, hi = 0.0, total = 0.0;
    for (int iy = 0; iy < n_; ++iy)
      for (int ix = 0; ix < n_; ++ix) {
        const std::size_t i = static_cast<std::size_t>(iy) * n_ + ix;
        const double p = std::norm(U[i]);
        total += p;
        grad += k2_[i] * p;
        if (std::abs(index_frequency(ix)) > cut || std::abs(index_frequency(iy)) > cut) hi += p;
      }
    const double h = L_ / n_;
    d.energy = 0.5 * grad * h * h / (static_cast<double>(n_) * n_) + 0.25 * mu * d.l4;
    d.unresolved = total > 0.0 ? hi / total : 0.0;
    return d;
  }

 private:
  int n_;
  double L_;
  CVec buf_;
  std::vector<double> k2_;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

template <class Field, class Stepper>
BasicTrajectory<Field> run(const Field& u0, const EvolveConfig& cfg, Stepper& stepper) {
  validate(cfg);
  if (!all_finite(u0.values)) throw std::invalid_argument("initial datum is not finite");

  BasicTrajectory<Field> traj;
  traj.mu = cfg.mu;
  const double t_eps = 1e-12 * std::max(1.0, std::abs(cfg.t_end) + std::abs(cfg.t_start));

  std::vector<double> outputs;
  for (double t : cfg.output_times)
    if (t > cfg.t_start + t_eps && t <= cfg.t_end + t_eps) outputs.push_back(std::min(t, cfg.t_end));
  std::sort(outputs.begin(), outputs.end());
  outputs.erase(std::unique(outputs.begin(), outputs.end()), outputs.end());
  const bool by_times = !cfg.output_times.empty();
  std::size_t next_out = 0;

  Field u = u0;
  double t = cfg.t_start;
  const Diagnostics d0 = stepper.diagnose(u, cfg.mu);
  const double threshold = cfg.blowup_linf_threshold > 0.0 ? cfg.blowup_linf_threshold
                           : d0.linf > 0.0                 ? 1e6 * d0.linf
                                                           : std::numeric_limits<double>::infinity();
  double l4_cum = 0.0, prev_l4 = d0.l4, linf = d0.linf;
  traj.series.push_back({t, 0.0, d0.mass, d0.energy, d0.linf, 0.0});
  traj.snapshots.push_back({t, u});

  std::size_t steps = 0;
  while (t < cfg.t_end - t_eps) {
    if (steps >= cfg.max_steps) {
      traj.termination = Termination::NumericFailure;
      traj.message = "step budget exhausted";
      break;
    }
    double dt = cfg.dt0;
    if (cfg.adaptive && linf > 0.0) dt = std::min(dt, cfg.c_a / (linf * linf));
    double target = cfg.t_end;
    if (by_times && next_out < outputs.size()) target = std::min(target, outputs[next_out]);
    bool lands = false;
    if (t + dt >= target - t_eps) {
      dt = target - t;
      lands = true;
    }
    if (dt < 1e-12 && linf > threshold) {
      traj.termination = Termination::BlowupForward;
      break;
    }

    Field next;
    Diagnostics d;
    try {
      next = composed_step(stepper, u, dt, cfg.mu, cfg.scheme);
      d = stepper.diagnose(next, cfg.mu);
      if (!d.finite()) throw NumericFailure("non-finite diagnostics");
    } catch (const NumericFailure& e) {
      traj.termination = Termination::NumericFailure;
      traj.message = e.what();
      break;
    }
    if (d.unresolved > cfg.resolution_tolerance) {
      traj.resolution_limited = true;
      if (d.linf >= cfg.blowup_growth_factor * d0.linf) {
        traj.termination = Termination::BlowupForward;
        traj.message = "solution concentrated below the grid scale";
      } else {
        traj.termination = Termination::NumericFailure;
        traj.message = "solution left the resolved band";
      }
      break;
    }

    ++steps;
    const double t_new = lands ? target : t + dt;
    l4_cum += 0.5 * (t_new - t) * (prev_l4 + d.l4);
    prev_l4 = d.l4;
    u = std::move(next);
    t = t_new;
    linf = d.linf;
    traj.series.push_back({t, dt, d.mass, d.energy, d.linf, l4_cum});

    bool take = false;
    if (by_times) {
      if (lands && next_out < outputs.size() && target == outputs[next_out]) {
        take = true;
        ++next_out;
      }
    } else {
      take = steps % static_cast<std::size_t>(cfg.snapshot_stride) == 0;
    }
    if (take) traj.snapshots.push_back({t, u});

    if (d.linf > threshold) {
      traj.termination = Termination::BlowupForward;
      traj.message = "sup norm exceeded threshold";
      break;
    }
  }
  if (traj.snapshots.back().t != t) traj.snapshots.push_back({t, u});
  if (traj.termination == Termination::BlowupForward) traj.blowup = fit_blowup(traj.series);
  return traj;
}

}  // namespace

void validate(const EvolveConfig& cfg) {
  if (!(cfg.dt0 > 0.0) || !std::isfinite(cfg.dt0)) throw std::invalid_argument("dt0 must be positive");
  if (!(cfg.t_end > cfg.t_start)) throw std::invalid_argument("t_end must exceed t_start");
  if (!std::isfinite(cfg.mu)) throw std::invalid_argument("mu must be finite");
  if (!(cfg.c_a > 0.0)) throw std::invalid_argument("c_a must be positive");
  if (cfg.blowup_linf_threshold < 0.0) throw std::invalid_argument("blowup threshold must be positive");
  if (!(cfg.resolution_tolerance > 0.0)) throw std::invalid_argument("resolution tolerance must be positive");
  if (cfg.snapshot_stride < 1) throw std::invalid_argument("snapshot stride must be >= 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ReachedEnd:
      return "reached-end";
    case Termination::BlowupForward:
      return "blowup-forward";
    case Termination::BlowupBackward:
      return "blowup-backward";
    case Termination::NumericFailure:
      return "numeric-failure";
  }
  return "unknown";
}

std::string to_string(Scheme s) { return s == Scheme::Strang ? "strang" : "yoshida4"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "strang") return Scheme::Strang;
  if (name == "yoshida4") return Scheme::Yoshida4;
  throw std::invalid_argument("unknown scheme: " + name);
}

RadialField step_nls(const RadialField& u, double dt, double mu, Scheme scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  RadialStepper s(u.grid);
  return composed_step(s, u, dt, mu, scheme);
}

Trajectory evolve(const RadialField& u0, const EvolveConfig& cfg) {
  RadialStepper stepper(u0.grid);
  return run(u0, cfg, stepper);
}

std::optional<BlowupEstimate> fit_blowup(const std::vector<StepRecord>& series) {
  if (series.size() < 6) return std::nullopt;
  const double top = series.back().linf;
  std::size_t first = series.size() - 1;
  while (first > 0 && series[first - 1].linf >= 0.1 * top && series[first - 1].linf <= series[first].linf) --first;
  const std::size_t count = series.size() - first;
  if (count < 6) return std::nullopt;
  const double t_last = series.back().t;
  const double width = t_last - series[first].t;
  if (!(width > 0.0)) return std::nullopt;

  struct Line {
    double slope, intercept, rms;
  };
  auto regress = [&](double t_star) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = first; i < series.size(); ++i) {
      const double x = std::log(t_star - series[i].t), y = std::log(series[i].linf);
      sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double m = static_cast<double>(count);
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    double ss = 0.0;
    for (std::size_t i = first; i < series.size(); ++i) {
      const double e = intercept + slope * std::log(t_star - series[i].t) - std::log(series[i].linf);
      ss += e * e;
    }
    return Line{slope, intercept, std::sqrt(ss / m)};
  };

  // golden-section search over s = log(T* - t_last)
  double a = std::log(1e-6 * width), b = std::log(10.0 * width);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = regress(t_last + std::exp(c)).rms, fd = regress(t_last + std::exp(d)).rms;
  for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a);
      fc = regress(t_last + std::exp(c)).rms;
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a);
      fd = regress(t_last + std::exp(d)).rms;
    }
  }
  const double t_star = t_last + std::exp(0.5 * (a + b));
  const Line fit = regress(t_star);
  return BlowupEstimate{t_star, fit.slope, fit.intercept, series[first].t, t_last, fit.rms};
}

double duhamel_residual(const Trajectory& traj, double t0, double t1) {
  if (t0 == t1) return 0.0;
  if (t1 < t0) throw std::invalid_argument("duhamel_residual needs t0 <= t1");
  const auto& snaps = traj.snapshots;
  auto find = [&](double t) {
    const double tol = 1e-12 * std::max(1.0, std::abs(t));
    for (std::size_t i = 0; i < snaps.size(); ++i)
      if (std::abs(snaps[i].t - t) <= tol) return i;
    throw std::invalid_argument("time is not a snapshot time");
  };
  const std::size_t i0 = find(t0), i1 = find(t1);
  const std::size_t m = i1 - i0;  // intervals
  if (m < 9) throw std::invalid_argument("duhamel_residual needs >= 8 snapshots strictly inside [t0, t1]");
  const double h = (snaps[i1].t - snaps[i0].t) / static_cast<double>(m);
  for (std::size_t i = i0; i < i1; ++i)
    if (std::abs(snaps[i + 1].t - snaps[i].t - h) > 1e-9 * h)
      throw std::invalid_argument("duhamel_residual needs uniformly spaced snapshots");

  // quadrature weights: composite Simpson, closing with 3/8 when m is odd
  std::vector<double> w(m + 1, 0.0);
  const std::size_t simpson_end = (m % 2 == 0) ? m : m - 3;
  for (std::size_t j = 0; j + 2 <= simpson_end; j += 2) {
    w[j] += h / 3.0;
    w[j + 1] += 4.0 * h / 3.0;
    w[j + 2] += h / 3.0;
  }
  if (simpson_end != m) {
    const std::size_t j = simpson_end;
    w[j] += 3.0 * h / 8.0;
    w[j + 1] += 9.0 * h / 8.0;
    w[j + 2] += 9.0 * h / 8.0;
    w[j + 3] += 3.0 * h / 8.0;
  }

  const auto& g = snaps[i0].u.grid;
  const double ta = snaps[i0].t, tb = snaps[i1].t;
  SpectralField acc = free_propagator_multiplier(hankel_forward(snaps[i0].u), tb - ta);
  const SpectralField end = hankel_forward(snaps[i1].u);
  for (int k = 0; k < g->size(); ++k) acc.coeffs[k] = end.coeffs[k] - acc.coeffs[k];
  if (traj.mu != 0.0) {
    for (std::size_t j = 0; j <= m; ++j) {
      RadialField f = snaps[i0 + j].u;
      for (auto& z : f.values) z *= traj.mu * std::norm(z);
      const auto G = free_propagator_multiplier(hankel_forward(f), tb - snaps[i0 + j].t);
      for (int k = 0; k < g->size(); ++k) acc.coeffs[k] += cplx(0.0, w[j]) * G.coeffs[k];
    }
  }
  return l2_norm(acc);
}

// -- Cartesian -----------------------------------------------------------------

CartesianField::CartesianField(int n_, double L_) : n(n_), L(L_), values(static_cast<std::size_t>(n_) * n_) {
  if (!is_power_of_two(n_)) throw std::invalid_argument("Cartesian n must be a power of two >= 8");
  if (!(L_ > 0.0)) throw std::invalid_argument("Cartesian box side must be positive");
}

CartesianField to_cartesian(const RadialField& f, int n, double L) {
  CartesianField out(n, L);
  const SpectralField F = hankel_forward(f);
  const double h = out.spacing();
  std::unordered_map<long, cplx> cache;
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      const long mx = ix - n / 2, my = iy - n / 2;
      const long key = mx * mx + my * my;
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, evaluate_at(F, h * std::sqrt(static_cast<double>(key)))).first;
      out.at(ix, iy) = it->second;
    }
  return out;
}

double mass(const CartesianField& f) {
  double acc = 0.0;
  for (const auto& z : f.values) acc += std::norm(z);
  return acc * f.spacing() * f.spacing();
}

double quartic_integral(const CartesianField& f) {
  double acc = 0.0;
  for (const auto& z : f.values) acc += std::norm(z) * std::norm(z);
  return acc * f.spacing() * f.spacing();
}

double energy(const CartesianField& f, double mu) {
  CartesianStepper s(f.n, f.L);
  return 0.5 * s.gradient_norm_sq(f) + 0.25 * mu * quartic_integral(f);
}

double l2_distance(const CartesianField& a, const CartesianField& b) {
  if (a.n != b.n || a.L != b.L) throw std::invalid_argument("Cartesian fields live on different boxes");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(acc) * a.spacing();
}

double aliasing_fraction(const CartesianField& f) { return CartesianStepper(f.n, f.L).aliasing_fraction(f); }

std::array<double, 2> momentum(const CartesianField& f) { return CartesianStepper(f.n, f.L).momentum(f); }

CartesianField fourier_shift(const CartesianField& f, std::array<double, 2> x0) {
  return CartesianStepper(f.n, f.L).translate(f, x0);
}

std::array<double, 2> centroid(const CartesianField& f) {
  double m = 0.0, x = 0.0, y = 0.0;
  for (int iy = 0; iy < f.n; ++iy)
    for (int ix = 0; ix < f.n; ++ix) {
      const double p = std::norm(f.at(ix, iy));
      m += p;
      x += p * f.coord(ix);
      y += p * f.coord(iy);
    }
  if (m == 0.0) return {0.0, 0.0};
  return {x / m, y / m};
}

CartesianField cartesian_step(const CartesianField& u, double dt, double mu, Scheme scheme) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  CartesianStepper s(u.n, u.L);
  return composed_step(s, u, dt, mu, scheme);
}

CartesianTrajectory cartesian_evolve(const CartesianField& u0, const EvolveConfig& cfg) {
  CartesianStepper stepper(u0.n, u0.L);
  if (stepper.aliasing_fraction(u0) > 1e-8) throw std::invalid_argument("initial datum is not band-limited on the box");
  EvolveConfig c = cfg;
  // the aliasing fraction plays the role of the unresolved spectral fraction
  c.resolution_tolerance = std::max(cfg.resolution_tolerance, 1e-8);
  return run(u0, c, stepper);
}

}  // namespace nlslab
