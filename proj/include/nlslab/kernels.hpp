#pragma once

// Data-parallel inner loops. Each kernel has an OpenMP version (namespace
// nlslab::kernels) and a plain serial version (nlslab::kernels::reference)
// that the tests hold the parallel one against; bench/ compares the two.

#include <complex>
#include <span>

namespace nlslab::kernels {

using cplx = std::complex<double>;

/// y = A x for a row-major n x n real matrix and complex vectors.
void matvec(std::span<const double> A, std::span<const cplx> x, std::span<cplx> y);

/// Y = A X for a block of column vectors stored contiguously (column j is
/// X[j*n .. j*n+n)). Uses a blocked GEMM on the real and imaginary parts.
void matmat(std::span<const double> A, std::span<const cplx> X, std::span<cplx> Y, int n);

/// Y = A[:, k0:k0+m) X where X holds m-row column vectors back to back and
/// Y the corresponding n-row results.
void matmat_columns(std::span<const double> A, int n, int k0, int m, std::span<const cplx> X, std::span<cplx> Y);

/// u[k] *= exp(-i * coeff * |u[k]|^2), the exact cubic phase rotation.
void cubic_phase(std::span<cplx> u, double coeff);

/// u[k] *= exp(-i * phase_rate * xi2[k]).
void diagonal_phase(std::span<cplx> u, std::span<const double> xi2, double phase_rate);

/// sum_k w[k] |u[k]|^p for p in {2, 4}.
double weighted_power_sum(std::span<const double> w, std::span<const cplx> u, int p);

namespace reference {

void matvec(std::span<const double> A, std::span<const cplx> x, std::span<cplx> y);
void cubic_phase(std::span<cplx> u, double coeff);
void diagonal_phase(std::span<cplx> u, std::span<const double> xi2, double phase_rate);
double weighted_power_sum(std::span<const double> w, std::span<const cplx> u, int p);

}  // namespace reference

}  // namespace nlslab::kernels
