#pragma once

#include "nlslab/diagnostics.hpp"
#include "nlslab/ensemble.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nlslab {

struct ProbeOptions {
  int ensemble_size = 64;
  std::uint64_t seed = 7;
  /// Grid (or sample count) and radius; 0 picks the probe's default.
  int n = 0;
  double R = 0.0;
  double q = 3.5;  // shao
  /// Repeat at 2n and compare the fitted constants.
  bool refine = true;
  /// Replaces the random ensemble when non-empty.
  std::vector<GaussianMixture> members;
};

struct ProbeReport {
  std::string name;
  int ensemble_size = 0;
  int n = 0;
  double R = 0.0;
  /// Largest LHS / RHS over the ensemble, scaling prefactors included.
  double worst_ratio = 0.0;
  /// worst_ratio, or the prefactor of the fitted power law for probes that fit one.
  double fitted_constant = 0.0;
  std::optional<LogLogFit> exponent;
  double expected_exponent = 0.0;
  /// (parameter, worst value) pairs: N for bernstein / bernstein_l4 / radial_sobolev / shao,
  /// M/N for bilinear, t for dispersive.
  std::vector<std::pair<double, double>> curve;
  double refined_constant = 0.0;
  int refined_n = 0;
  bool stable = false;  // |refined / fitted - 1| <= 0.25
};

/// bernstein, bernstein_l4, radial_sobolev, dispersive, strichartz_l4,
/// strichartz_l2linf, bilinear, weighted, shao.
const std::vector<std::string>& probe_names();

/// Evaluates both sides of the named free-flow inequality over a seeded
/// ensemble of Gaussian mixtures. Throws std::invalid_argument for an unknown
/// name or an empty ensemble, std::out_of_range when a band exceeds kmax and
/// NumericFailure if a ratio is not finite.
ProbeReport probe_inequality(const std::string& name, const ProbeOptions& opts = {});

}  // namespace nlslab
