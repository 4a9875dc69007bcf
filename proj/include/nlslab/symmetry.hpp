#pragma once

#include "nlslab/evolution.hpp"
#include "nlslab/groundstate.hpp"

#include <array>

namespace nlslab {

/// g_{theta, xi0, x0, lambda}: [g f](x) = lambda^{-1} e^{i theta} e^{i x.xi0} f((x - x0)/lambda).
struct GroupElement {
  double theta = 0.0;
  std::array<double, 2> xi0{0.0, 0.0};
  std::array<double, 2> x0{0.0, 0.0};
  double lambda = 1.0;
  bool radial = true;

  static GroupElement identity() { return {}; }
  static GroupElement phase(double theta) { return {theta, {0, 0}, {0, 0}, 1.0, true}; }
  static GroupElement scaling(double lambda) { return {0.0, {0, 0}, {0, 0}, lambda, true}; }
  static GroupElement boost(std::array<double, 2> xi0) { return {0.0, xi0, {0, 0}, 1.0, false}; }
  static GroupElement translation(std::array<double, 2> x0) { return {0.0, {0, 0}, x0, 1.0, false}; }
  bool has_shifts() const { return xi0 != std::array<double, 2>{0, 0} || x0 != std::array<double, 2>{0, 0}; }
};

/// Throws std::invalid_argument for lambda <= 0, non-finite entries, or a
/// radial element with nonzero shifts.
void validate(const GroupElement& g);

/// Spectral resampling; throws std::invalid_argument for non-radial g and
/// std::out_of_range when the rescaled field would leave the grid (mass beyond
/// R or spectral mass beyond 0.8 kmax above tail_tolerance of the total).
RadialField apply_group_element(const GroupElement& g, const RadialField& f, double tail_tolerance = 1e-11);

/// Cartesian backend: lambda must be 1 (std::out_of_range otherwise) and xi0
/// must lie on the box's frequency lattice (std::invalid_argument otherwise).
/// Translations are exact Fourier shifts.
CartesianField apply_group_element(const GroupElement& g, const CartesianField& f);

/// T_g u(t) = g_{theta - t|xi0|^2, xi0, x0 + 2 xi0 t, lambda} u(t / lambda^2),
/// re-timed to lambda^2 I. Radial trajectories need a radial g; series
/// entries are mapped by the scaling laws of each quantity.
Trajectory transform_trajectory(const GroupElement& g, const Trajectory& traj);
CartesianTrajectory transform_trajectory(const GroupElement& g, const CartesianTrajectory& traj);

/// conj(u(-t)), listed in increasing time; blowup direction flips.
Trajectory time_reverse(const Trajectory& traj);
/// u(t + t0).
Trajectory time_translate(const Trajectory& traj, double t0);

/// v(t, x) = |t|^{-1} e^{i|x|^2/4t} u(-1/t, x/t) on each snapshot.
/// Throws std::invalid_argument if the time interval contains 0 and
/// std::out_of_range when the chirp's local frequency R/(2|t|) exceeds 0.8 kmax.
Trajectory pseudoconformal(const Trajectory& traj);
RadialField pseudoconformal_snapshot(const RadialField& u, double s);

/// Exact pseudoconformal image of e^{it}Q at time t != 0:
/// |t|^{-1} e^{i r^2/4t} e^{-i/t} Q(r/|t|), sampled on g.
RadialField pc_soliton(const GroundState& q, GridPtr g, double t);

}  // namespace nlslab
