#include "tsf/numkit/kernels.hpp"

#include <bit>
#include <cstdint>
#include <vector>

namespace tsf::kernels {

namespace {

// Register tile: MR rows of C by NR columns; 4 x 32 doubles fits the
// AVX-512 register file with room for the B row.
constexpr std::size_t MR = 4;
constexpr std::size_t NR = 32;
// Depth block: one packed KC x NR panel of B stays in L1.
constexpr std::size_t KC = 128;
// Row block: the packed MC x KC block of A stays in L2.
constexpr std::size_t MC = 128;

template <bool TransA>
inline double a_at(const double* a, std::size_t lda, std::size_t i, std::size_t p) {
    return TransA ? a[p * lda + i] : a[i * lda + p];
}

// Packs rows [i0, i0 + mc) and depths [p0, p0 + kc) of A into MR-row tiles,
// each stored depth-major; missing rows are zero.
template <bool TransA>
void pack_a(std::size_t i0, std::size_t mc, std::size_t p0, std::size_t kc, const double* a,
            std::size_t lda, double* out) {
    for (std::size_t it = 0; it < mc; it += MR) {
        const std::size_t rows = mc - it < MR ? mc - it : MR;
        for (std::size_t p = 0; p < kc; ++p) {
            for (std::size_t r = 0; r < MR; ++r) {
                out[p * MR + r] = r < rows ? a_at<TransA>(a, lda, i0 + it + r, p0 + p) : 0.0;
            }
        }
        out += kc * MR;
    }
}

// Packs depths [p0, p0 + kc) of B into NR-column panels, each stored
// depth-major; missing columns are zero.
void pack_b(std::size_t p0, std::size_t kc, std::size_t n, const double* b, std::size_t ldb,
            double* out) {
    for (std::size_t j = 0; j < n; j += NR) {
        const std::size_t cols = n - j < NR ? n - j : NR;
        for (std::size_t p = 0; p < kc; ++p) {
            const double* src = b + (p0 + p) * ldb + j;
            double* dst = out + p * NR;
            std::size_t jj = 0;
            for (; jj < cols; ++jj) {
                dst[jj] = src[jj];
            }
            for (; jj < NR; ++jj) {
                dst[jj] = 0.0;
            }
        }
        out += kc * NR;
    }
}

void micro_kernel(std::size_t kc, const double* ap, const double* bp, double* c, std::size_t ldc,
                  std::size_t rows, std::size_t cols) {
    double acc[MR][NR] = {};
    for (std::size_t p = 0; p < kc; ++p) {
        const double* brow = bp + p * NR;
        const double a0 = ap[p * MR + 0];
        const double a1 = ap[p * MR + 1];
        const double a2 = ap[p * MR + 2];
        const double a3 = ap[p * MR + 3];
        for (std::size_t jj = 0; jj < NR; ++jj) {
            const double bv = brow[jj];
            acc[0][jj] += a0 * bv;
            acc[1][jj] += a1 * bv;
            acc[2][jj] += a2 * bv;
            acc[3][jj] += a3 * bv;
        }
    }
    if (rows == MR && cols == NR) {
        for (std::size_t r = 0; r < MR; ++r) {
            double* crow = c + r * ldc;
            for (std::size_t jj = 0; jj < NR; ++jj) {
                crow[jj] += acc[r][jj];
            }
        }
        return;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        double* crow = c + r * ldc;
        for (std::size_t jj = 0; jj < cols; ++jj) {
            crow[jj] += acc[r][jj];
        }
    }
}

template <bool TransA>
void gemm_impl(std::size_t m, std::size_t k, std::size_t n, const double* a, std::size_t lda,
               const double* b, std::size_t ldb, double* c, std::size_t ldc) {
    if (m == 0 || n == 0 || k == 0) {
        return;
    }
    thread_local std::vector<double> a_pack;
    thread_local std::vector<double> b_pack;
    const std::size_t n_padded = (n + NR - 1) / NR * NR;
    b_pack.resize(KC * n_padded);
    a_pack.resize(KC * MC);
    for (std::size_t p0 = 0; p0 < k; p0 += KC) {
        const std::size_t kc = k - p0 < KC ? k - p0 : KC;
        pack_b(p0, kc, n, b, ldb, b_pack.data());
        for (std::size_t i0 = 0; i0 < m; i0 += MC) {
            const std::size_t mc = m - i0 < MC ? m - i0 : MC;
            pack_a<TransA>(i0, mc, p0, kc, a, lda, a_pack.data());
            for (std::size_t j = 0; j < n; j += NR) {
                const double* bp = b_pack.data() + (j / NR) * kc * NR;
                const std::size_t cols = n - j < NR ? n - j : NR;
                for (std::size_t it = 0; it < mc; it += MR) {
                    const std::size_t rows = mc - it < MR ? mc - it : MR;
                    micro_kernel(kc, a_pack.data() + (it / MR) * kc * MR, bp,
                                 c + (i0 + it) * ldc + j, ldc, rows, cols);
                }
            }
        }
    }
}

// exp(x) = 2^n * e^r with n = round(x / ln 2) and |r| <= ln(2) / 2; e^r by
// its degree-13 Taylor polynomial (truncation below 1e-17 relative).
// Needs -fno-trapping-math for GCC to vectorize the clamp.
inline double exp_poly(double x) {
    constexpr double log2e = 1.4426950408889634;
    constexpr double ln2_hi = 6.93147180369123816490e-01;
    constexpr double ln2_lo = 1.90821492927058770002e-10;
    constexpr double shifter = 0x1.8p52;
    x = x < -708.0 ? -708.0 : x;
    x = x > 708.0 ? 708.0 : x;
    // Adding 1.5 * 2^52 rounds x * log2e to an integer held in the low mantissa bits.
    const double k = x * log2e + shifter;
    const double n = k - shifter;
    const double r = (x - n * ln2_hi) - n * ln2_lo;
    double p = 1.0 / 6227020800.0;
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    const std::uint64_t bits = (std::bit_cast<std::uint64_t>(k) + 1023) << 52;
    return p * std::bit_cast<double>(bits);
}

} // namespace

double exp_approx(double x) { return exp_poly(x); }

void sigmoid_inplace(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 1.0 / (1.0 + exp_poly(-x[i]));
    }
}

void tanh_inplace(double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 1.0 - 2.0 / (1.0 + exp_poly(2.0 * x[i]));
    }
}

void gemm_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, std::size_t lda,
              const double* b, std::size_t ldb, double* c, std::size_t ldc) {
    gemm_impl<false>(m, k, n, a, lda, b, ldb, c, ldc);
}

void gemm_tn_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, std::size_t lda,
                 const double* b, std::size_t ldb, double* c, std::size_t ldc) {
    gemm_impl<true>(m, k, n, a, lda, b, ldb, c, ldc);
}

} // namespace tsf::kernels
