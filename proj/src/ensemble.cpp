#include "nlslab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace nlslab {

cplx GaussianMixture::value(double r) const {
  cplx acc = 0.0;
  for (const auto& t : terms) acc += t.amplitude * std::exp(-t.rate * r * r);
  return acc;
}

cplx GaussianMixture::spectrum(double xi) const {
  cplx acc = 0.0;
  for (const auto& t : terms) acc += t.amplitude * std::exp(-xi * xi / (4.0 * t.rate)) / (2.0 * t.rate);
  return acc;
}

cplx GaussianMixture::evolved(double time, double r) const {
  cplx acc = 0.0;
  for (const auto& t : terms) {
    const cplx d = 1.0 + cplx(0.0, 4.0 * time) * t.rate;
    acc += t.amplitude / d * std::exp(-t.rate * r * r / d);
  }
  return acc;
}

double GaussianMixture::l2_norm() const {
  cplx acc = 0.0;
  for (const auto& a : terms)
    for (const auto& b : terms) acc += a.amplitude * std::conj(b.amplitude) / (a.rate + std::conj(b.rate));
  return std::sqrt(std::max(0.0, std::numbers::pi * acc.real()));
}

double GaussianMixture::min_width() const {
  double w = INFINITY;
  for (const auto& t : terms) w = std::min(w, 1.0 / std::sqrt(t.rate.real()));
  return w;
}

double GaussianMixture::max_width() const {
  double w = 0.0;
  for (const auto& t : terms) w = std::max(w, 1.0 / std::sqrt(t.rate.real()));
  return w;
}

RadialField GaussianMixture::on_grid(GridPtr g) const {
  return sample(std::move(g), [this](double r) { return value(r); });
}

SpectralField GaussianMixture::spectrum_on_grid(GridPtr g) const {
  return sample_spectrum(std::move(g), [this](double xi) { return spectrum(xi); });
}

std::vector<GaussianMixture> random_ensemble(std::uint64_t seed, const EnsembleOptions& opts) {
  std::vector<GaussianMixture> out;
  out.reserve(opts.size);
  const double lo = std::log(opts.min_width), hi = std::log(opts.max_width);
  for (int m = 0; m < opts.size; ++m) {
    CounterRng rng(seed, static_cast<std::uint64_t>(m));
    GaussianMixture g;
    const int terms = 1 + static_cast<int>(rng.uniform() * opts.max_terms);
    const bool chirped = rng.uniform() < 0.5;
    // cluster the terms of one member around a common scale
    const double base = rng.uniform(lo, hi);
    for (int j = 0; j < terms; ++j) {
      const double width = std::exp(std::clamp(base + 0.3 * rng.normal(), lo, hi));
      const double re = 1.0 / (2.0 * width * width);
      const double chirp = chirped ? rng.uniform(-opts.max_chirp, opts.max_chirp) : 0.0;
      const cplx amp(rng.normal(), rng.normal());
      g.terms.push_back({amp, cplx(re, chirp * re)});
    }
    const double norm = g.l2_norm();
    for (auto& t : g.terms) t.amplitude /= norm;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace nlslab
