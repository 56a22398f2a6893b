#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace wbn::kernels {

// Inner-loop kernels over row-major double buffers. Every variant must agree
// with the scalar reference up to floating-point reassociation.
struct KernelTable {
    const char* name;

    // c[m x n] = a[m x k] * b[n x k]^T
    void (*gemm_nt)(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t n, std::size_t k);
    // c[n x k] += a[m x n]^T * b[m x k]
    void (*gemm_tn_acc)(const double* a, const double* b, double* c,
                        std::size_t m, std::size_t n, std::size_t k);
    // c[m x k] = a[m x n] * b[n x k]
    void (*gemm_nn)(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t n, std::size_t k);
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2();

// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available();

// The table used by the library. Chosen once: WBN_SIMD=scalar|avx2 overrides,
// otherwise the widest available variant.
const KernelTable& active();

// Switch variants at runtime (tests, benchmarking). Returns false for an
// unknown or unavailable name.
bool select(std::string_view name);

} // namespace wbn::kernels
