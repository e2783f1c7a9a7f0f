#pragma once

#include <cstddef>

// Raw-pointer kernels used by the recurrent cells. Callers own shape checks.
namespace tsf::kernels {

/// C[m x n] += A[m x k] * B[k x n]. All row-major with explicit leading dims.
void gemm_acc(std::size_t m, std::size_t k, std::size_t n,
              const double* a, std::size_t lda,
              const double* b, std::size_t ldb,
              double* c, std::size_t ldc);

/// C[m x n] += A^T * B where A is stored k x m.
void gemm_tn_acc(std::size_t m, std::size_t k, std::size_t n,
                 const double* a, std::size_t lda,
                 const double* b, std::size_t ldb,
                 double* c, std::size_t ldc);

/// In-place logistic function over n contiguous values. Uses a polynomial
/// exp accurate to a few ulp, written so the loop vectorizes.
void sigmoid_inplace(double* x, std::size_t n);

/// In-place hyperbolic tangent via tanh(x) = 1 - 2 / (1 + exp(2x)).
void tanh_inplace(double* x, std::size_t n);

/// Scalar form of the polynomial exp used above; inputs are clamped to
/// [-708, 708].
double exp_approx(double x);

} // namespace tsf::kernels
