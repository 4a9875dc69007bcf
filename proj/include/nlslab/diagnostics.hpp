#pragma once

#include "nlslab/evolution.hpp"

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nlslab {

// -- spacetime norms and scattering ------------------------------------------------

/// int_{t0}^{t1} int |u|^4 dx dt from the per-step series (the cumulative is
/// interpolated linearly between steps). Throws std::invalid_argument when
/// [t0, t1] is not inside the trajectory.
double strichartz_accumulate(const Trajectory& traj, double t0, double t1);
/// Over the whole trajectory.
double strichartz_accumulate(const Trajectory& traj);

struct ScatteringOptions {
  /// Length of the tail window; 0 means the last quarter of the run.
  double tail_window = 0.0;
  double tolerance = 1e-3;
};

struct ScatteringReport {
  bool scatters = false;
  RadialField u_plus;       // e^{-i t_end Delta} u(t_end)
  double cauchy_gap = 0.0;  // max ||v(t_i) - v(t_j)||_2 over the tail snapshots
  double tail_l4 = 0.0;     // L^4_{t,x}^4 over the tail window
  double previous_l4 = 0.0; // same over the window before it
  bool l4_decaying = false;
  int tail_snapshots = 0;
};

/// Pulls the tail snapshots back by the free flow and compares them.
/// Throws std::invalid_argument unless the run reached its end.
ScatteringReport scattering_test(const Trajectory& traj, const ScatteringOptions& opts = {});

// -- scale functions ----------------------------------------------------------------

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

/// Least squares log y = intercept + slope log x over positive pairs.
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct ScaleSeries {
  double eta = 0.01;
  std::vector<double> t;
  std::vector<double> N;   // frequency scale, on the 2^{k/8} lattice
  std::vector<double> x;   // spatial center (0 for radial data)
  std::vector<double> xi;  // frequency center (0 for radial data)
  /// Smallest radius / frequency outside which at most eta of the mass lies.
  std::vector<double> n_freq;
  std::vector<double> r_space;
  /// (eta', C_hat(eta')) for eta' in {0.1, 0.01, 0.001}.
  std::vector<std::pair<double, double>> c_hat;

  std::size_t size() const { return t.size(); }
};

/// Throws std::invalid_argument unless eta is in (0, 0.5).
ScaleSeries scale_functions(std::span<const Snapshot<RadialField>> snapshots, double eta = 0.01);
ScaleSeries scale_functions(const Trajectory& traj, double eta = 0.01);

/// Fit of log N against log(t_star - t) over snapshots with t < t_star.
LogLogFit scale_exponent(const ScaleSeries& s, double t_star);

enum class Scenario { SolitonLike, Cascade, SelfSimilar, Inconclusive };
std::string to_string(Scenario s);

struct ScenarioReport {
  Scenario label = Scenario::Inconclusive;
  double max_min_ratio = 0.0;
  LogLogFit time_fit;  // log N against log t (only when all t > 0)
  double median = 0.0;
};

/// Soliton-like if max N / min N <= 4; self-similar if log N against log t
/// has slope in [-0.6, -0.4] with R^2 >= 0.9; cascade if N stays below four
/// times its median and drops under a quarter of it at both window ends.
/// Throws std::invalid_argument for fewer than 50 samples.
ScenarioReport classify_scenario(const ScaleSeries& s);

/// The same series with time measured back from t_star (tau = t_star - t),
/// listed in increasing tau; samples at or past t_star are dropped.
ScaleSeries from_blowup_end(const ScaleSeries& s, double t_star);

// -- virial identity ------------------------------------------------------------------

/// M_a = 2 Im int conj(f) a . grad f with a(x) = x psi(|x| / R).
double virial(const RadialField& f, double Rcut);

struct VirialReport {
  double R = 0.0;
  double t = 0.0;
  std::vector<double> times;  // all snapshot times
  std::vector<double> Ma;     // virial at each snapshot
  double dMa_dt_fd = 0.0;
  /// 8E, then the mass, gradient and quartic cutoff corrections.
  std::array<double, 4> rhs_terms{};
  double identity_gap = 0.0;

  double rhs() const { return rhs_terms[0] + rhs_terms[1] + rhs_terms[2] + rhs_terms[3]; }
};

/// Right-hand side of the truncated virial identity at f.
std::array<double, 4> virial_rhs(const RadialField& f, double Rcut, double mu);

/// Fourth-order centered difference of the virial over the five snapshots
/// around t. Throws std::invalid_argument unless t is a snapshot time with two
/// uniformly spaced neighbours on each side.
VirialReport virial_identity(const Trajectory& traj, double t, double Rcut, double mu);

// -- concentration --------------------------------------------------------------------

/// int_{|x| <= rho} |f|^2 dx by Gauss-Legendre panels on the band-limited
/// interpolant; the whole disc for rho >= R.
double mass_in_ball(const RadialField& f, double rho);

struct ConcentrationPoint {
  double t = 0.0;
  double radius = 0.0;
  double mass = 0.0;
  double running_max = 0.0;
};

/// Mass within c_window (T* - t)^{1/2} for the last `last` snapshots (all when
/// 0). Throws std::invalid_argument unless the run blew up with a fitted T*.
std::vector<ConcentrationPoint> concentration_mass(const Trajectory& traj, double c_window, std::size_t last = 0);

}  // namespace nlslab
