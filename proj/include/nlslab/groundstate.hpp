#pragma once

#include "nlslab/radial_spectral.hpp"

#include <string>

namespace nlslab {

/// Townes profile Q: the positive radial solution of Delta Q + Q^3 = Q.
struct GroundState {
  enum class Method { Shooting, GradientFlow };

  RadialField profile;
  double mass = 0.0;          // ||Q||_2^2
  double grad_norm_sq = 0.0;  // ||grad Q||_2^2
  double l4_norm_4 = 0.0;     // int Q^4
  double q0 = 0.0;            // Q(0)
  Method method = Method::Shooting;
  double residual = 0.0;      // sup |Delta Q + Q^3 - Q| on r <= R/2
  int iterations = 0;

  /// Focusing energy 1/2 ||grad Q||^2 - 1/4 int Q^4.
  double energy() const { return 0.5 * grad_norm_sq - 0.25 * l4_norm_4; }
};

std::string to_string(GroundState::Method m);

/// Bisection on Q(0) for the radial ODE Q'' + Q'/r - Q + Q^3 = 0, integrated
/// with an adaptive 7/8-order Runge-Kutta-Fehlberg stepper; the far field is
/// matched to c K0(r). The profile is sampled on `grid`.
/// Throws std::invalid_argument if tol < 1e-13, NumericFailure if no bracket.
GroundState shoot_ground_state(double tol, GridPtr grid);

struct FlowOptions {
  double tol = 1e-11;          // residual target, raised to the roundoff floor of the grid
  int max_iterations = 2000;
  /// Seed profile; defaults to exp(-r^2/2).
  RadialField seed;
};

/// Independent fixed-point solver on the grid (renormalized spectral flow).
/// Throws std::invalid_argument for R < 15 or a zero seed, NumericFailure on
/// non-convergence.
GroundState gradient_flow_ground_state(GridPtr grid, const FlowOptions& opts = {});

/// Residual sup |Delta f + f^3 - f| over r <= rmax, Laplacian taken spectrally.
double ground_state_residual(const RadialField& f, double rmax);

/// J(f) = int |f|^4 M(Q) / (2 ||f||_2^2 ||grad f||_2^2); J <= 1 with equality at Q.
/// Throws std::invalid_argument for f = 0.
double gn_ratio(const RadialField& f, double ground_state_mass);

}  // namespace nlslab
