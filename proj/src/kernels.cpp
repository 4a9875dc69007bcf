#include "nlslab/kernels.hpp"

#include <Eigen/Dense>

#include <cassert>
#include <cmath>
#include <cstddef>

namespace nlslab::kernels {

namespace {
inline std::ptrdiff_t dim(std::size_t len) { return static_cast<std::ptrdiff_t>(len); }
}  // namespace

void matvec(std::span<const double> A, std::span<const cplx> x, std::span<cplx> y) {
  const std::ptrdiff_t n = dim(x.size());
  assert(y.size() == x.size() && A.size() == x.size() * x.size());
  const double* a = A.data();
  const double* xv = reinterpret_cast<const double*>(x.data());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double* row = a + i * n;
    double re = 0.0, im = 0.0;
#pragma omp simd reduction(+ : re, im)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      re += row[k] * xv[2 * k];
      im += row[k] * xv[2 * k + 1];
    }
    y[i] = cplx(re, im);
  }
}

void matmat(std::span<const double> A, std::span<const cplx> X, std::span<cplx> Y, int n) {
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::ptrdiff_t cols = dim(X.size()) / n;
  assert(Y.size() == X.size());
  Eigen::Map<const RowMatrix> a(A.data(), n, n);
  // column-major n x cols complex block viewed as real/imag parts
  Eigen::Map<const Eigen::MatrixXcd> x(X.data(), n, cols);
  Eigen::MatrixXd re = x.real(), im = x.imag();
  Eigen::MatrixXd yr = a * re;
  Eigen::MatrixXd yi = a * im;
  Eigen::Map<Eigen::MatrixXcd> y(Y.data(), n, cols);
  y.real() = yr;
  y.imag() = yi;
}

void matmat_columns(std::span<const double> A, int n, int k0, int m, std::span<const cplx> X, std::span<cplx> Y) {
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const std::ptrdiff_t cols = dim(X.size()) / m;
  assert(Y.size() == static_cast<std::size_t>(cols) * n);
  Eigen::Map<const RowMatrix> a(A.data(), n, n);
  Eigen::Map<const Eigen::MatrixXcd> x(X.data(), m, cols);
  Eigen::MatrixXd re = x.real(), im = x.imag();
  Eigen::MatrixXd yr = a.middleCols(k0, m) * re;
  Eigen::MatrixXd yi = a.middleCols(k0, m) * im;
  Eigen::Map<Eigen::MatrixXcd> y(Y.data(), n, cols);
  y.real() = yr;
  y.imag() = yi;
}

void cubic_phase(std::span<cplx> u, double coeff) {
  const std::ptrdiff_t n = dim(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double phase = -coeff * std::norm(u[k]);
    u[k] *= cplx(std::cos(phase), std::sin(phase));
  }
}

void diagonal_phase(std::span<cplx> u, std::span<const double> xi2, double phase_rate) {
  const std::ptrdiff_t n = dim(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double phase = -phase_rate * xi2[k];
    u[k] *= cplx(std::cos(phase), std::sin(phase));
  }
}

double weighted_power_sum(std::span<const double> w, std::span<const cplx> u, int p) {
  const std::ptrdiff_t n = dim(u.size());
  double acc = 0.0;
  if (p == 2) {
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) acc += w[k] * std::norm(u[k]);
  } else {
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const double a = std::norm(u[k]);
      acc += w[k] * a * a;
    }
  }
  return acc;
}

namespace reference {

void matvec(std::span<const double> A, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += A[i * n + k] * x[k];
    y[i] = acc;
  }
}

void cubic_phase(std::span<cplx> u, double coeff) {
  for (auto& v : u) v *= std::exp(cplx(0.0, -coeff * std::norm(v)));
}

void diagonal_phase(std::span<cplx> u, std::span<const double> xi2, double phase_rate) {
  for (std::size_t k = 0; k < u.size(); ++k) u[k] *= std::exp(cplx(0.0, -phase_rate * xi2[k]));
}

double weighted_power_sum(std::span<const double> w, std::span<const cplx> u, int p) {
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += w[k] * std::pow(std::abs(u[k]), p);
  return acc;
}

}  // namespace reference

}  // namespace nlslab::kernels
