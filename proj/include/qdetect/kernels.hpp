#pragma once

#include <complex>
#include <cstddef>

// Low-level complex vector/matrix kernels. Every operation exists in a
// portable scalar form and, on x86-64 hardware that supports it, an AVX2+FMA
// form. One backend is selected at load time (overridable with the
// QDETECT_KERNELS environment variable or force_backend) and the two are
// required to agree to rounding error; see tests/test_kernels.cpp.
//
// Matrices are dense, square, row-major, std::complex<double>. Output
// buffers never alias inputs.

namespace qdetect::kernels {

using cdouble = std::complex<double>;

struct Backend {
    const char* name;

    // y[i] += a * x[i]
    void (*axpy)(std::size_t len, cdouble a, const cdouble* x, cdouble* y);
    // x[i] *= a
    void (*scale)(std::size_t len, cdouble a, cdouble* x);
    // sum_i conj(x[i]) * y[i]
    cdouble (*conj_dot)(std::size_t len, const cdouble* x, const cdouble* y);
    // sum_i |x[i]|^2
    double (*norm_sq)(std::size_t len, const cdouble* x);
    // sum_i |x[i] - y[i]|^2
    double (*diff_norm_sq)(std::size_t len, const cdouble* x, const cdouble* y);
    // (u, v) <- (a*u + b*v, c*u + d*v), elementwise two-row rotation
    void (*pair_combine)(std::size_t len, cdouble* u, cdouble* v,
                         cdouble a, cdouble b, cdouble c, cdouble d);
    // C = A * B
    void (*matmul)(int n, const cdouble* a, const cdouble* b, cdouble* c);
    // C = A * B^dagger
    void (*matmul_nh)(int n, const cdouble* a, const cdouble* b, cdouble* c);
    // C = A^dagger * B
    void (*matmul_hn)(int n, const cdouble* a, const cdouble* b, cdouble* c);
};

// Backend in effect for this process.
const Backend& active();

// Always available portable implementation.
const Backend& scalar_backend();

// AVX2+FMA implementation, or nullptr when the CPU lacks support.
const Backend* avx2_backend();

// Select "scalar", "avx2" or "auto". Throws qdetect::Error for an unknown
// name or when the requested backend is unsupported on this machine.
void force_backend(const char* name);

}  // namespace qdetect::kernels
