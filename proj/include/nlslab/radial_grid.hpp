#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

/// Bessel-zero grid on the disc of radius R with the order-0 quasi-discrete
/// Hankel transform attached.
///
/// Nodes are r[k] = j_{k+1} R / j_{n+1} and frequencies xi[k] = j_{k+1} / R,
/// where j_m is the m-th positive zero of J0. The symmetric transform matrix
/// maps sqrt-weighted samples to sqrt-weighted spectral coefficients and is
/// corrected to be orthogonal to machine precision, so it is its own inverse.
///
/// Instances are immutable after construction and may be shared between
/// threads. Build them through make_grid(), which caches by (n, R).
class RadialGrid {
 public:
  RadialGrid(int n, double R);

  int size() const noexcept { return n_; }
  double radius() const noexcept { return R_; }
  /// Largest resolvable radial frequency j_{n+1} / R.
  double kmax() const noexcept { return kmax_; }
  /// Frequencies above this are treated as unresolved.
  double resolved_kmax() const noexcept { return 0.8 * kmax_; }

  std::span<const double> r() const noexcept { return r_; }
  std::span<const double> xi() const noexcept { return xi_; }
  std::span<const double> xi_squared() const noexcept { return xi2_; }
  /// Quadrature weights for integrals over R^2 in physical space.
  std::span<const double> weights() const noexcept { return w_; }
  /// Quadrature weights for integrals over R^2 in frequency space.
  std::span<const double> spectral_weights() const noexcept { return wxi_; }

  /// Row-major n x n symmetric orthogonal transform matrix.
  std::span<const double> transform_matrix() const noexcept { return T_; }
  /// Row-major n x n matrix taking spectral coefficients to d/dr at the nodes.
  std::span<const double> derivative_matrix() const noexcept { return D_; }

  std::span<const double> space_scale() const noexcept { return sr_; }
  std::span<const double> freq_scale() const noexcept { return sxi_; }

  /// max |(T^T T - I)_{ij}| after the polar correction.
  double orthogonality_defect() const noexcept { return defect_; }

  /// Positive zeros j_1..j_{n+1} of J0.
  std::span<const double> bessel_zeros() const noexcept { return zeros_; }

 private:
  int n_;
  double R_;
  double kmax_;
  std::vector<double> zeros_, r_, xi_, xi2_, w_, wxi_, sr_, sxi_, T_, D_;
  double defect_ = 0.0;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Throws std::invalid_argument for n < 8 or R <= 0.
GridPtr make_grid(int n, double R);

}  // namespace nlslab
