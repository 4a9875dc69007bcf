#include "nlslab/radial_grid.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/bessel.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nlslab {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Newton-Schulz iteration towards the orthogonal polar factor. The raw
// quasi-discrete Hankel matrix is already orthogonal to O(1e-6) or better, so
// two or three sweeps reach machine precision.
double polar_correct(RowMatrix& X) {
  const Eigen::Index n = X.rows();
  const RowMatrix I = RowMatrix::Identity(n, n);
  double defect = 0.0;
  for (int sweep = 0; sweep < 8; ++sweep) {
    RowMatrix E = X.transpose() * X;
    defect = (E - I).cwiseAbs().maxCoeff();
    if (defect < 4e-16 * std::sqrt(static_cast<double>(n))) break;
    X = 0.5 * X * (3.0 * I - E);
    X = 0.5 * (X + X.transpose()).eval();
  }
  RowMatrix E = X.transpose() * X;
  return (E - I).cwiseAbs().maxCoeff();
}

}  // namespace

RadialGrid::RadialGrid(int n, double R) : n_(n), R_(R) {
  if (n < 8) throw std::invalid_argument("grid needs n >= 8, got " + std::to_string(n));
  if (!(R > 0.0) || !std::isfinite(R))
    throw std::invalid_argument("grid radius must be positive");

  namespace bm = boost::math;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  zeros_.reserve(n + 1);
  bm::cyl_bessel_j_zero(0.0, 1, static_cast<unsigned>(n + 1), std::back_inserter(zeros_));
  const double S = zeros_[n];
  kmax_ = S / R;

  r_.resize(n);
  xi_.resize(n);
  xi2_.resize(n);
  w_.resize(n);
  wxi_.resize(n);
  sr_.resize(n);
  sxi_.resize(n);
  std::vector<double> absJ1(n);
  for (int k = 0; k < n; ++k) {
    const double j = zeros_[k];
    absJ1[k] = std::abs(bm::cyl_bessel_j(1.0, j));
    r_[k] = j * R / S;
    xi_[k] = j / R;
    xi2_[k] = xi_[k] * xi_[k];
    // radial weights for int_0^R g(r) r dr and int g(xi) xi dxi
    const double wr = 2.0 * R * R / (S * S * absJ1[k] * absJ1[k]);
    const double wx = 2.0 / (R * R * absJ1[k] * absJ1[k]);
    w_[k] = two_pi * wr;
    wxi_[k] = two_pi * wx;
    sr_[k] = std::sqrt(wr);
    sxi_[k] = std::sqrt(wx);
  }

  RowMatrix X(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = i; k < n; ++k) {
      const double v = 2.0 * bm::cyl_bessel_j(0.0, zeros_[i] * zeros_[k] / S) / (S * absJ1[i] * absJ1[k]);
      X(i, k) = v;
      X(k, i) = v;
    }
  }
  defect_ = polar_correct(X);
  T_.assign(X.data(), X.data() + static_cast<std::size_t>(n) * n);

  D_.resize(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      D_[static_cast<std::size_t>(i) * n + k] =
          -(wxi_[k] / two_pi) * xi_[k] * bm::cyl_bessel_j(1.0, xi_[k] * r_[i]);
}

GridPtr make_grid(int n, double R) {
  if (n < 8) throw std::invalid_argument("grid needs n >= 8, got " + std::to_string(n));
  if (!(R > 0.0) || !std::isfinite(R))
    throw std::invalid_argument("grid radius must be positive");

  static std::mutex mu;
  static std::map<std::pair<int, double>, std::weak_ptr<const RadialGrid>> cache;
  const std::lock_guard lock(mu);
  auto& slot = cache[{n, R}];
  if (auto hit = slot.lock()) return hit;
  auto grid = std::make_shared<const RadialGrid>(n, R);
  slot = grid;
  return grid;
}

}  // namespace nlslab
