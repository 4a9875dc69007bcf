#pragma once

#include "nlslab/radial_spectral.hpp"
#include "nlslab/symmetry.hpp"

#include <array>
#include <vector>

namespace nlslab {

/// Free solution e^{it Delta} f sampled at a set of times; values are stored
/// time-major (time j occupies [j n, (j+1) n)).
struct FreeHistory {
  std::vector<double> t;
  CVec values;
  int n = 0;

  std::span<const cplx> at(std::size_t j) const { return {values.data() + j * n, static_cast<std::size_t>(n)}; }
};

/// Evaluates the free flow of F at every time with one batched transform.
FreeHistory free_history(const SpectralField& F, std::span<const double> times);

/// Simpson nodes on [t0, t1] with an even number of panels >= samples - 1.
std::vector<double> simpson_nodes(double t0, double t1, int samples);
std::vector<double> simpson_weights(double t0, double t1, int samples);

/// int_{t0}^{t1} int |e^{it Delta} f|^4 dx dt by Simpson in time.
double free_strichartz_l4(const RadialField& f, double t0, double t1, int samples = 257);

struct BubbleOptions {
  int time_samples = 257;
  /// Ball radius in units of 1/M.
  double ball_constant = 2.0;
};

struct Bubble {
  double t0 = 0.0;
  std::array<double, 2> x0{0.0, 0.0};
  std::array<double, 2> xi0{0.0, 0.0};
  double radius = 0.0;
  double mass_in_ball = 0.0;
  double window_begin = 0.0;
  double window_end = 0.0;
  /// Dyadic frequency of the dominant Littlewood-Paley piece.
  double frequency = 0.0;
  /// Radius at which |e^{i t0 Delta} phi_M| peaks (the centre is moved to 0).
  double peak_radius = 0.0;
  double l4 = 0.0;  // int_I int |e^{it Delta} phi|^4
};

/// Scans dyadic M, picks the piece with the largest free L^4_{t,x} norm on
/// [t_begin, t_end], locates its space-time maximum and returns the ball of
/// radius ball_constant / M about the origin at that time. Throws
/// HypothesisNotMet when int_I int |e^{it Delta} phi|^4 < eta.
Bubble find_bubble(const RadialField& phi, double t_begin, double t_end, double eta, const BubbleOptions& opts = {});

struct ProfileOptions {
  double t_begin = -0.0625;
  double t_end = 0.0625;
  int time_samples = 257;
  /// Local piece: frequencies above M / frequency_ratio inside the ball of
  /// radius ball_constant / M at the concentration time.
  double ball_constant = 8.0;
  double frequency_ratio = 8.0;
};

struct Profile {
  RadialField phi;  // renormalized to unit RMS radius
  GroupElement g;   // radial: phase and scale
  double t = 0.0;   // concentration time
  double mass = 0.0;
};

struct ProfileDecomposition {
  std::vector<Profile> profiles;
  RadialField remainder;
  double mass_decoupling_gap = 0.0;  // |M(u) - sum M(phi_j) - M(w)|
  double remainder_l4 = 0.0;         // free L^4_{t,x}^4 of the remainder on the reference window

  double profile_mass() const {
    double m = 0.0;
    for (const auto& p : profiles) m += p.mass;
    return m;
  }
};

/// Greedy extraction on the last element of the sequence: find a bubble,
/// take its local piece at the concentration time, pull it back by the free
/// flow and subtract. Stops when the remainder's free L^4_{t,x}^4 on the
/// reference window drops below tol or max_J profiles were taken. Throws
/// std::invalid_argument for an empty sequence or mismatched grids.
ProfileDecomposition extract_profiles(const std::vector<RadialField>& sequence, int max_J, double tol,
                                      const ProfileOptions& opts = {});

}  // namespace nlslab
