// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "wbn/kernels.hpp"

#include <immintrin.h>

namespace wbn::kernels {

namespace {

inline double hsum(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    const __m128d high64 = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, high64));
}

// Lane i of the result is the horizontal sum of v_i.
inline __m256d hsum4(__m256d v0, __m256d v1, __m256d v2, __m256d v3)
{
    const __m256d t0 = _mm256_hadd_pd(v0, v1);
    const __m256d t1 = _mm256_hadd_pd(v2, v3);
    const __m256d lo = _mm256_permute2f128_pd(t0, t1, 0x20);
    const __m256d hi = _mm256_permute2f128_pd(t0, t1, 0x31);
    return _mm256_add_pd(lo, hi);
}

double dot_avx2(const double* x, const double* y, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        sum += x[i] * y[i];
    }
    return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

// Two rows of a against four rows of b: eight dot products sharing loads.
void dot_block_2x4(const double* a0, const double* a1, const double* b, std::size_t k,
                   double* c0, double* c1)
{
    const double* b0 = b;
    const double* b1 = b + k;
    const double* b2 = b + 2 * k;
    const double* b3 = b + 3 * k;

    __m256d s00 = _mm256_setzero_pd(), s01 = _mm256_setzero_pd();
    __m256d s02 = _mm256_setzero_pd(), s03 = _mm256_setzero_pd();
    __m256d s10 = _mm256_setzero_pd(), s11 = _mm256_setzero_pd();
    __m256d s12 = _mm256_setzero_pd(), s13 = _mm256_setzero_pd();

    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
        const __m256d x0 = _mm256_loadu_pd(a0 + p);
        const __m256d x1 = _mm256_loadu_pd(a1 + p);
        __m256d w = _mm256_loadu_pd(b0 + p);
        s00 = _mm256_fmadd_pd(x0, w, s00);
        s10 = _mm256_fmadd_pd(x1, w, s10);
        w = _mm256_loadu_pd(b1 + p);
        s01 = _mm256_fmadd_pd(x0, w, s01);
        s11 = _mm256_fmadd_pd(x1, w, s11);
        w = _mm256_loadu_pd(b2 + p);
        s02 = _mm256_fmadd_pd(x0, w, s02);
        s12 = _mm256_fmadd_pd(x1, w, s12);
        w = _mm256_loadu_pd(b3 + p);
        s03 = _mm256_fmadd_pd(x0, w, s03);
        s13 = _mm256_fmadd_pd(x1, w, s13);
    }

    alignas(32) double r0[4];
    alignas(32) double r1[4];
    _mm256_store_pd(r0, hsum4(s00, s01, s02, s03));
    _mm256_store_pd(r1, hsum4(s10, s11, s12, s13));
    for (; p < k; ++p) {
        r0[0] += a0[p] * b0[p];
        r0[1] += a0[p] * b1[p];
        r0[2] += a0[p] * b2[p];
        r0[3] += a0[p] * b3[p];
        r1[0] += a1[p] * b0[p];
        r1[1] += a1[p] * b1[p];
        r1[2] += a1[p] * b2[p];
        r1[3] += a1[p] * b3[p];
    }
    for (int q = 0; q < 4; ++q) {
        c0[q] = r0[q];
        c1[q] = r1[q];
    }
}

void gemm_nt_avx2(const double* a, const double* b, double* c,
                  std::size_t m, std::size_t n, std::size_t k)
{
    std::size_t i = 0;
    for (; i + 2 <= m; i += 2) {
        const double* a0 = a + i * k;
        const double* a1 = a0 + k;
        double* c0 = c + i * n;
        double* c1 = c0 + n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            dot_block_2x4(a0, a1, b + j * k, k, c0 + j, c1 + j);
        }
        for (; j < n; ++j) {
            c0[j] = dot_avx2(a0, b + j * k, k);
            c1[j] = dot_avx2(a1, b + j * k, k);
        }
    }
    for (; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            c[i * n + j] = dot_avx2(a + i * k, b + j * k, k);
        }
    }
}

// dst += sum_q coef[q] * rows[q], four source rows per pass over dst.
void accumulate_rows4(const double coef[4], const double* const rows[4], double* dst, std::size_t k)
{
    const __m256d a0 = _mm256_set1_pd(coef[0]);
    const __m256d a1 = _mm256_set1_pd(coef[1]);
    const __m256d a2 = _mm256_set1_pd(coef[2]);
    const __m256d a3 = _mm256_set1_pd(coef[3]);
    std::size_t p = 0;
    for (; p + 4 <= k; p += 4) {
        __m256d acc = _mm256_loadu_pd(dst + p);
        acc = _mm256_fmadd_pd(a0, _mm256_loadu_pd(rows[0] + p), acc);
        acc = _mm256_fmadd_pd(a1, _mm256_loadu_pd(rows[1] + p), acc);
        acc = _mm256_fmadd_pd(a2, _mm256_loadu_pd(rows[2] + p), acc);
        acc = _mm256_fmadd_pd(a3, _mm256_loadu_pd(rows[3] + p), acc);
        _mm256_storeu_pd(dst + p, acc);
    }
    for (; p < k; ++p) {
        dst[p] += coef[0] * rows[0][p] + coef[1] * rows[1][p] + coef[2] * rows[2][p] +
                  coef[3] * rows[3][p];
    }
}

void gemm_tn_acc_avx2(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t n, std::size_t k)
{
    for (std::size_t j = 0; j < n; ++j) {
        double* cj = c + j * k;
        std::size_t r = 0;
        for (; r + 4 <= m; r += 4) {
            const double coef[4] = {a[r * n + j], a[(r + 1) * n + j], a[(r + 2) * n + j],
                                    a[(r + 3) * n + j]};
            const double* const rows[4] = {b + r * k, b + (r + 1) * k, b + (r + 2) * k,
                                           b + (r + 3) * k};
            accumulate_rows4(coef, rows, cj, k);
        }
        for (; r < m; ++r) {
            axpy_avx2(a[r * n + j], b + r * k, cj, k);
        }
    }
}

void gemm_nn_avx2(const double* a, const double* b, double* c,
                  std::size_t m, std::size_t n, std::size_t k)
{
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            ci[p] = 0.0;
        }
        const double* ai = a + i * n;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const double* const rows[4] = {b + j * k, b + (j + 1) * k, b + (j + 2) * k,
                                           b + (j + 3) * k};
            accumulate_rows4(ai + j, rows, ci, k);
        }
        for (; j < n; ++j) {
            axpy_avx2(ai[j], b + j * k, ci, k);
        }
    }
}

constexpr KernelTable kAvx2{
    "avx2", gemm_nt_avx2, gemm_tn_acc_avx2, gemm_nn_avx2, dot_avx2, axpy_avx2,
};

} // namespace

const KernelTable* avx2_table()
{
    return &kAvx2;
}

} // namespace wbn::kernels
