#include "nlslab/probes.hpp"

#include "nlslab/errors.hpp"
#include "nlslab/profiles.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace nlslab {

namespace {

using Rule = boost::math::quadrature::gauss<double, 10>;

struct Quadrature {
  std::vector<double> x, w;

  void panel(double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t j = 0; j < Rule::abscissa().size(); ++j) {
      const double x0 = Rule::abscissa()[j], w0 = Rule::weights()[j];
      if (x0 == 0.0) {
        x.push_back(mid);
        w.push_back(half * w0);
        continue;
      }
      x.push_back(mid - half * x0);
      x.push_back(mid + half * x0);
      w.push_back(half * w0);
      w.push_back(half * w0);
    }
  }
};

/// Gauss-Legendre panels on [-T, T]: `per` panels across [-tau, tau] and
/// `per` panels per octave beyond it.
Quadrature time_rule(double tau, double T, int per) {
  Quadrature q;
  for (int p = 0; p < 2 * per; ++p) q.panel(-tau + 2.0 * tau * p / (2 * per), -tau + 2.0 * tau * (p + 1) / (2 * per));
  for (double a = tau; a < T; a *= 2.0) {
    const double b = std::min(2.0 * a, T);
    for (int p = 0; p < per; ++p) {
      const double lo = a + (b - a) * p / per, hi = a + (b - a) * (p + 1) / per;
      q.panel(lo, hi);
      q.panel(-hi, -lo);
    }
  }
  return q;
}

/// Widest Gaussian term of e^{it Delta} m.
double evolved_width(const GaussianMixture& m, double t) {
  double w = 0.0;
  for (const auto& term : m.terms) {
    const cplx d = 1.0 + cplx(0.0, 4.0 * t) * term.rate;
    w = std::max(w, 1.0 / std::sqrt((term.rate / d).real()));
  }
  return w;
}

/// sup over r in [r_min, 5 width] of r^power |e^{it Delta} m| on `count` samples.
double weighted_sup(const GaussianMixture& m, double t, double power, double r_min, int count) {
  const double r_max = 5.0 * evolved_width(m, t);
  double best = 0.0;
  for (int k = 0; k < count; ++k) {
    const double r = r_min + (r_max - r_min) * k / (count - 1);
    best = std::max(best, std::pow(r, power) * std::abs(m.evolved(t, r)));
  }
  return best;
}

/// int |e^{it Delta} m|^4 dx from the Gaussian products.
double quartic_closed(const GaussianMixture& m, double t) {
  std::vector<cplx> c, b;
  for (const auto& term : m.terms) {
    const cplx d = 1.0 + cplx(0.0, 4.0 * t) * term.rate;
    c.push_back(term.amplitude / d);
    b.push_back(term.rate / d);
  }
  cplx acc = 0.0;
  const std::size_t J = c.size();
  for (std::size_t i = 0; i < J; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t k = 0; k < J; ++k)
        for (std::size_t l = 0; l < J; ++l)
          acc += c[i] * c[j] * std::conj(c[k] * c[l]) / (b[i] + b[j] + std::conj(b[k]) + std::conj(b[l]));
  return std::numbers::pi * acc.real();
}

double l1_norm(const GaussianMixture& m, int panels) {
  Quadrature q;
  const double top = 8.0 * m.max_width();
  for (int p = 0; p < panels; ++p) q.panel(top * p / panels, top * (p + 1) / panels);
  double s = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * std::abs(m.value(q.x[i])) * 2.0 * std::numbers::pi * q.x[i];
  return s;
}

/// Time integral of fn(member, t) over [-T, T] with the horizon scaled to the member.
double time_integral(const GaussianMixture& m, int n, const std::function<double(double)>& fn) {
  const double w0 = m.min_width(), w1 = m.max_width();
  const auto q = time_rule(0.1 * w0 * w0, 1e4 * w1 * w1, std::max(1, n / 64));
  double s = 0.0;
  for (std::size_t i = 0; i < q.x.size(); ++i) s += q.w[i] * fn(q.x[i]);
  return s;
}

/// Spectrum of N m(N x) on the grid times a band symbol.
SpectralField rescaled_band(const GaussianMixture& m, GridPtr g, double N, const FrequencyBand& band) {
  if (band.upper_edge() > g->kmax()) throw std::out_of_range("frequency band beyond kmax");
  return sample_spectrum(g, [&](double xi) { return m.spectrum(xi / N) / N * lp_symbol(band, xi, false); });
}

double lq_spacetime(const FreeHistory& h, std::span<const double> tw, const RadialGrid& g, double q) {
  const auto w = g.weights();
  double acc = 0.0;
  for (std::size_t j = 0; j < h.t.size(); ++j) {
    const auto u = h.at(j);
    double s = 0.0;
    for (int k = 0; k < h.n; ++k) s += w[k] * std::pow(std::abs(u[k]), q);
    acc += tw[j] * s;
  }
  return std::pow(acc, 1.0 / q);
}

struct Pass {
  double worst = 0.0;
  double constant = 0.0;
  std::optional<LogLogFit> fit;
  std::vector<std::pair<double, double>> curve;
};

using Members = std::vector<GaussianMixture>;

/// Worst value per parameter, folded over members in parallel.
template <class Fn>
std::vector<double> worst_over(const Members& ens, std::size_t params, Fn&& fn) {
  std::vector<double> worst(params, 0.0);
  const int count = static_cast<int>(ens.size());
  std::exception_ptr error;
#pragma omp parallel
  {
    std::vector<double> local(params, 0.0);
#pragma omp for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
      try {
        const auto v = fn(i);
        for (std::size_t p = 0; p < params; ++p) local[p] = std::max(local[p], v[p]);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
#pragma omp critical
    for (std::size_t p = 0; p < params; ++p) worst[p] = std::max(worst[p], local[p]);
  }
  if (error) std::rethrow_exception(error);
  return worst;
}

Pass from_curve(const std::vector<double>& xs, const std::vector<double>& ys) {
  Pass p;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    p.curve.emplace_back(xs[i], ys[i]);
    p.worst = std::max(p.worst, ys[i]);
  }
  p.constant = p.worst;
  return p;
}

const std::vector<double> kBands{0.5, 1.0, 2.0, 4.0};

// ||P f||_q <= C N^{1 - 2/q} ||P f||_2 for P = P_{<=N} and P_N, q in {4, inf}
Pass bernstein_q(const Members& ens, int n, double R, double q) {
  const auto g = make_grid(n, R);
  const auto worst = worst_over(ens, kBands.size(), [&](int i) {
    std::vector<double> v(kBands.size(), 0.0);
    const auto F = ens[i].spectrum_on_grid(g);
    for (std::size_t b = 0; b < kBands.size(); ++b) {
      const double N = kBands[b];
      for (const auto& band : {FrequencyBand::at_most(N), FrequencyBand::dyadic(N)}) {
        const auto P = lp_project(F, band);
        const double norm = l2_norm(P);
        if (norm < 1e-8) continue;
        const auto f = hankel_inverse(P);
        const double lhs = std::isinf(q) ? sup_norm(f) : lp_norm(f, q);
        v[b] = std::max(v[b], lhs / (std::pow(N, 1.0 - 2.0 / q) * norm));
      }
    }
    return v;
  });
  return from_curve(kBands, worst);
}

Pass bernstein(const Members& ens, int n, double R, const ProbeOptions&) {
  return bernstein_q(ens, n, R, INFINITY);
}

Pass bernstein_l4(const Members& ens, int n, double R, const ProbeOptions&) { return bernstein_q(ens, n, R, 4.0); }

// || |x|^{1/2} P_N f ||_inf <= C N^{1/2} ||P_N f||_2
Pass radial_sobolev(const Members& ens, int n, double R, const ProbeOptions&) {
  const auto g = make_grid(n, R);
  const auto r = g->r();
  const auto worst = worst_over(ens, kBands.size(), [&](int i) {
    std::vector<double> v(kBands.size(), 0.0);
    const auto F = ens[i].spectrum_on_grid(g);
    for (std::size_t b = 0; b < kBands.size(); ++b) {
      const double N = kBands[b];
      const auto P = lp_project(F, FrequencyBand::dyadic(N));
      const double norm = l2_norm(P);
      if (norm < 1e-8) continue;
      const auto f = hankel_inverse(P);
      double s = 0.0;
      for (int k = 0; k < n; ++k) s = std::max(s, std::sqrt(r[k]) * std::abs(f.values[k]));
      v[b] = s / (std::sqrt(N) * norm);
    }
    return v;
  });
  return from_curve(kBands, worst);
}

// ||e^{it Delta} f||_inf <= C |t|^{-1} ||f||_1 on t in [1, 100]
Pass dispersive(const Members& ens, int n, double, const ProbeOptions&) {
  std::vector<double> ts;
  for (int j = 0; j <= 40; ++j) ts.push_back(std::pow(10.0, j / 20.0));
  const auto worst = worst_over(ens, ts.size(), [&](int i) {
    const double l1 = l1_norm(ens[i], std::max(8, n / 8));
    std::vector<double> v(ts.size());
    for (std::size_t j = 0; j < ts.size(); ++j) v[j] = ts[j] * weighted_sup(ens[i], ts[j], 0.0, 0.0, n) / l1;
    return v;
  });
  return from_curve(ts, worst);
}

// ||e^{it Delta} f||_{L^4_{t,x}} <= C ||f||_2
Pass strichartz_l4(const Members& ens, int n, double, const ProbeOptions&) {
  const auto worst = worst_over(ens, 1, [&](int i) {
    const double s = time_integral(ens[i], n, [&](double t) { return quartic_closed(ens[i], t); });
    return std::vector<double>{std::pow(s, 0.25) / ens[i].l2_norm()};
  });
  return from_curve({0.0}, worst);
}

// ||e^{it Delta} f||_{L^2_t L^inf_x} <= C ||f||_2 (radial endpoint)
Pass strichartz_l2linf(const Members& ens, int n, double, const ProbeOptions&) {
  const auto worst = worst_over(ens, 1, [&](int i) {
    const double s = time_integral(ens[i], n, [&](double t) {
      const double m = weighted_sup(ens[i], t, 0.0, 0.0, n);
      return m * m;
    });
    return std::vector<double>{std::sqrt(s) / ens[i].l2_norm()};
  });
  return from_curve({0.0}, worst);
}

// || |x|^{1/2} e^{it Delta} f ||_{L^4_t L^inf_x} <= C ||f||_2, sup taken over r >= 2 / kmax
Pass weighted(const Members& ens, int n, double R, const ProbeOptions&) {
  const double r_min = 2.0 * R / ((n + 0.75) * std::numbers::pi);
  const auto worst = worst_over(ens, 1, [&](int i) {
    const double s = time_integral(ens[i], n, [&](double t) { return std::pow(weighted_sup(ens[i], t, 0.5, r_min, n), 4); });
    return std::vector<double>{std::pow(s, 0.25) / ens[i].l2_norm()};
  });
  return from_curve({0.0}, worst);
}

// ||P_N e^{it Delta} f||_{L^q_{t,x}} <= C N^{1 - 4/q} ||f||_2 with f rescaled to frequency N
// and the window [-1/N^2, 1/N^2]
Pass shao(const Members& ens, int n, double R, const ProbeOptions& opts) {
  const double q = opts.q;
  const std::vector<double> Ns{0.5, 1.0, 2.0, 4.0, 8.0};
  const auto g = make_grid(n, R);
  const auto worst = worst_over(ens, Ns.size(), [&](int i) {
    std::vector<double> v(Ns.size());
    for (std::size_t b = 0; b < Ns.size(); ++b) {
      const double N = Ns[b], T = 1.0 / (N * N);
      const auto F = rescaled_band(ens[i], g, N, FrequencyBand::dyadic(N));
      const auto t = simpson_nodes(-T, T, 257);
      const auto tw = simpson_weights(-T, T, 257);
      v[b] = lq_spacetime(free_history(F, t), tw, *g, q) / ens[i].l2_norm();
    }
    return v;
  });
  Pass p;
  p.fit = fit_loglog(Ns, worst);
  p.constant = std::exp(p.fit->intercept);
  for (std::size_t b = 0; b < Ns.size(); ++b) {
    p.curve.emplace_back(Ns[b], worst[b]);
    p.worst = std::max(p.worst, worst[b] / std::pow(Ns[b], 1.0 - 4.0 / q));
  }
  return p;
}

// ||(P_{>=N} u)(P_{<=M} v)||_{L^2_{t,x}} <= C (M/N)^{1/2} ||P_{>=N} u0|| ||P_{<=M} v0||
// with u0 the 2N piece of one member rescaled to 2N, v0 the next member rescaled to M
Pass bilinear(const Members& ens, int n, double R, const ProbeOptions&) {
  const double N = 4.0, T = 8.0;
  const std::vector<double> Ms{1.0, 0.25, 0.0625};
  const auto g = make_grid(n, R);
  const auto t = simpson_nodes(-T, T, 641);
  const auto tw = simpson_weights(-T, T, 641);
  const auto w = g->weights();
  const int count = static_cast<int>(ens.size());
  const auto worst = worst_over(ens, Ms.size(), [&](int i) {
    std::vector<double> v(Ms.size());
    auto U = rescaled_band(ens[i], g, 2.0 * N, FrequencyBand::dyadic(2.0 * N));
    U = lp_project(U, FrequencyBand::above(N));
    const double nu = l2_norm(U);
    const auto hu = free_history(U, t);
    for (std::size_t b = 0; b < Ms.size(); ++b) {
      const double M = Ms[b];
      const auto V = rescaled_band(ens[(i + 1) % count], g, M, FrequencyBand::at_most(M));
      const double nv = l2_norm(V);
      const auto hv = free_history(V, t);
      double acc = 0.0;
      for (std::size_t j = 0; j < t.size(); ++j) {
        const auto a = hu.at(j), c = hv.at(j);
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += w[k] * std::norm(a[k] * c[k]);
        acc += tw[j] * s;
      }
      v[b] = std::sqrt(acc) / (nu * nv);
    }
    return v;
  });
  Pass p;
  std::vector<double> ratios;
  for (double M : Ms) ratios.push_back(M / N);
  p.fit = fit_loglog(ratios, worst);
  p.constant = std::exp(p.fit->intercept);
  for (std::size_t b = 0; b < Ms.size(); ++b) {
    p.curve.emplace_back(ratios[b], worst[b]);
    p.worst = std::max(p.worst, worst[b] / std::sqrt(ratios[b]));
  }
  return p;
}

struct Entry {
  std::string name;
  int n;
  double R;
  Pass (*fn)(const Members&, int, double, const ProbeOptions&);
  double expected_exponent;
};

const std::vector<Entry>& catalog() {
  static const std::vector<Entry> entries{
      {"bernstein", 256, 40.0, bernstein, 0.0},
      {"bernstein_l4", 256, 40.0, bernstein_l4, 0.0},
      {"radial_sobolev", 256, 40.0, radial_sobolev, 0.0},
      {"dispersive", 256, 40.0, dispersive, 0.0},
      {"strichartz_l4", 256, 40.0, strichartz_l4, 0.0},
      {"strichartz_l2linf", 256, 40.0, strichartz_l2linf, 0.0},
      {"bilinear", 1024, 200.0, bilinear, 0.5},
      {"weighted", 256, 40.0, weighted, 0.0},
      {"shao", 512, 40.0, shao, 0.0},
  };
  return entries;
}

}  // namespace

const std::vector<std::string>& probe_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& e : catalog()) v.push_back(e.name);
    return v;
  }();
  return names;
}

ProbeReport probe_inequality(const std::string& name, const ProbeOptions& opts) {
  const auto it = std::find_if(catalog().begin(), catalog().end(), [&](const Entry& e) { return e.name == name; });
  if (it == catalog().end()) throw std::invalid_argument("unknown probe: " + name);
  if (opts.n < 0 || opts.R < 0.0) throw std::invalid_argument("grid parameters must be non-negative");
  if (name == "shao" && !(opts.q > 10.0 / 3.0)) throw std::invalid_argument("shao needs q > 10/3");

  Members ens = opts.members;
  if (ens.empty()) {
    if (opts.ensemble_size <= 0) throw std::invalid_argument("empty ensemble");
    EnsembleOptions eo;
    eo.size = opts.ensemble_size;
    ens = random_ensemble(opts.seed, eo);
  }

  ProbeReport rep;
  rep.name = name;
  rep.ensemble_size = static_cast<int>(ens.size());
  rep.n = opts.n > 0 ? opts.n : it->n;
  rep.R = opts.R > 0.0 ? opts.R : it->R;
  rep.expected_exponent = name == "shao" ? 1.0 - 4.0 / opts.q : it->expected_exponent;

  const auto p = it->fn(ens, rep.n, rep.R, opts);
  if (!std::isfinite(p.worst) || !std::isfinite(p.constant)) throw NumericFailure("probe ratio is not finite");
  rep.worst_ratio = p.worst;
  rep.fitted_constant = p.constant;
  rep.exponent = p.fit;
  rep.curve = p.curve;
  if (opts.refine) {
    rep.refined_n = 2 * rep.n;
    rep.refined_constant = it->fn(ens, rep.refined_n, rep.R, opts).constant;
    rep.stable = std::abs(rep.refined_constant / rep.fitted_constant - 1.0) <= 0.25;
  }
  return rep;
}

}  // namespace nlslab
