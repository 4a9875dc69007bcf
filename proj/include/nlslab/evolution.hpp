#pragma once

#include "nlslab/radial_spectral.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace nlslab {

/// Strang: half phase, exact linear flow, half phase (second order).
/// Yoshida4: the symmetric triple-jump composition of three Strang steps
/// (fourth order, same unitary substeps).
enum class Scheme { Strang, Yoshida4 };
std::string to_string(Scheme s);
/// Throws std::invalid_argument for unknown names.
Scheme parse_scheme(const std::string& name);

struct EvolveConfig {
  double mu = -1.0;
  Scheme scheme = Scheme::Strang;  // +1 defocusing, -1 focusing, 0 free
  double dt0 = 1e-3;
  double t_start = 0.0;
  double t_end = 1.0;
  bool adaptive = false;
  double c_a = 0.1;  // adaptive: dt = min(dt0, c_a / ||u||_inf^2)
  /// 0 means 1e6 * initial ||u||_inf.
  double blowup_linf_threshold = 0.0;
  /// Fraction of spectral mass above 0.8 kmax tolerated before the grid is
  /// declared under-resolved.
  double resolution_tolerance = 1e-12;
  /// Growth of ||u||_inf over its initial value that turns resolution loss
  /// into a blowup verdict rather than a numeric failure.
  double blowup_growth_factor = 4.0;
  int snapshot_stride = 1;
  /// When non-empty, snapshots are taken exactly at these times (steps are
  /// clipped to land on them) instead of every snapshot_stride steps.
  std::vector<double> output_times;
  std::size_t max_steps = 50'000'000;
};

/// Throws std::invalid_argument on inconsistent settings.
void validate(const EvolveConfig& cfg);

enum class Termination { ReachedEnd, BlowupForward, BlowupBackward, NumericFailure };
std::string to_string(Termination t);

struct StepRecord {
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double linf = 0.0;
  double l4_cum = 0.0;  // int_{t_start}^t int |u|^4 dx ds
};

/// Least-squares fit log||u||_inf = c + p log|T* - t| over the final decade of growth.
struct BlowupEstimate {
  double t_star = 0.0;
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  double rms = 0.0;
};

template <class Field>
struct Snapshot {
  double t;
  Field u;
};

template <class Field>
struct BasicTrajectory {
  double mu = 0.0;
  std::vector<Snapshot<Field>> snapshots;
  std::vector<StepRecord> series;
  Termination termination = Termination::ReachedEnd;
  std::optional<BlowupEstimate> blowup;
  /// The run stopped because the grid no longer resolved the solution.
  bool resolution_limited = false;
  std::string message;

  double t_begin() const { return snapshots.front().t; }
  double t_end() const { return snapshots.back().t; }
  bool blew_up() const {
    return termination == Termination::BlowupForward || termination == Termination::BlowupBackward;
  }
};

using Trajectory = BasicTrajectory<RadialField>;

/// One step of the split-step scheme; mu = 0 gives the free flow.
/// Throws NumericFailure on non-finite output.
RadialField step_nls(const RadialField& u, double dt, double mu, Scheme scheme = Scheme::Strang);

/// Advances u0 from cfg.t_start. Numeric failures end the run with
/// termination = NumericFailure and the last good snapshot kept.
Trajectory evolve(const RadialField& u0, const EvolveConfig& cfg);

/// Fits the blowup law to a series of (t, ||u||_inf); nullopt when the series
/// has fewer than 6 points in its last decade of growth.
std::optional<BlowupEstimate> fit_blowup(const std::vector<StepRecord>& series);

/// || u(t1) - e^{i(t1-t0)Delta} u(t0) + i int_{t0}^{t1} e^{i(t1-s)Delta} mu|u|^2 u(s) ds ||_2
/// with composite Simpson over the snapshots in [t0, t1] (assumed uniformly
/// spaced). Throws std::invalid_argument when t0, t1 are not snapshot times
/// or fewer than 8 snapshots lie strictly between them.
double duhamel_residual(const Trajectory& traj, double t0, double t1);

// -- Cartesian backend ---------------------------------------------------------

/// n x n samples of a field on the periodic square [-L/2, L/2)^2, row-major
/// with x varying fastest.
struct CartesianField {
  int n = 0;
  double L = 0.0;
  CVec values;

  CartesianField() = default;
  CartesianField(int n, double L);

  double spacing() const { return L / n; }
  double coord(int i) const { return -0.5 * L + i * spacing(); }
  cplx& at(int ix, int iy) { return values[static_cast<std::size_t>(iy) * n + ix]; }
  const cplx& at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * n + ix]; }
};

using CartesianTrajectory = BasicTrajectory<CartesianField>;

/// Throws std::invalid_argument if n is not a power of two >= 8 or L <= 0.
template <class Fn>
CartesianField sample_cartesian(int n, double L, Fn&& fn) {
  CartesianField f(n, L);
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) f.at(ix, iy) = fn(f.coord(ix), f.coord(iy));
  return f;
}

/// Radial field evaluated on the square through its band-limited interpolant.
CartesianField to_cartesian(const RadialField& f, int n, double L);

double mass(const CartesianField& f);
double energy(const CartesianField& f, double mu);
double quartic_integral(const CartesianField& f);
double l2_distance(const CartesianField& a, const CartesianField& b);
/// Fraction of spectral mass with any |k_i| above 0.8 * Nyquist.
double aliasing_fraction(const CartesianField& f);
/// Im int conj(f) grad f dx.
std::array<double, 2> momentum(const CartesianField& f);
/// f(x - x0) by an exact Fourier shift.
CartesianField fourier_shift(const CartesianField& f, std::array<double, 2> x0);
/// Mass-weighted mean position (x, y).
std::array<double, 2> centroid(const CartesianField& f);

CartesianField cartesian_step(const CartesianField& u, double dt, double mu, Scheme scheme = Scheme::Strang);

/// Same scheme and contracts as evolve(). Throws std::invalid_argument when
/// the initial datum has aliasing fraction above 1e-8.
CartesianTrajectory cartesian_evolve(const CartesianField& u0, const EvolveConfig& cfg);

}  // namespace nlslab
