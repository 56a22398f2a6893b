#include "wbn/kernels.hpp"

namespace wbn::kernels {

namespace {

void gemm_nt_scalar(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t n, std::size_t k)
{
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                sum += a[i * k + p] * b[j * k + p];
            }
            c[i * n + j] = sum;
        }
    }
}

void gemm_tn_acc_scalar(const double* a, const double* b, double* c,
                        std::size_t m, std::size_t n, std::size_t k)
{
    for (std::size_t j = 0; j < n; ++j) {
        double* cj = c + j * k;
        for (std::size_t r = 0; r < m; ++r) {
            const double alpha = a[r * n + j];
            const double* br = b + r * k;
            for (std::size_t p = 0; p < k; ++p) {
                cj[p] += alpha * br[p];
            }
        }
    }
}

void gemm_nn_scalar(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t n, std::size_t k)
{
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            ci[p] = 0.0;
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double alpha = a[i * n + j];
            const double* bj = b + j * k;
            for (std::size_t p = 0; p < k; ++p) {
                ci[p] += alpha * bj[p];
            }
        }
    }
}

double dot_scalar(const double* x, const double* y, std::size_t n)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += x[i] * y[i];
    }
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

constexpr KernelTable kScalar{
    "scalar", gemm_nt_scalar, gemm_tn_acc_scalar, gemm_nn_scalar, dot_scalar, axpy_scalar,
};

} // namespace

const KernelTable& scalar()
{
    return kScalar;
}

} // namespace wbn::kernels
