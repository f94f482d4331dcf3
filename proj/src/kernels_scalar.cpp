#include "qdetect/kernels.hpp"

#include <vector>

namespace qdetect::kernels {
namespace {

void axpy_scalar(std::size_t len, cdouble a, const cdouble* x, cdouble* y) {
    for (std::size_t i = 0; i < len; ++i) y[i] += a * x[i];
}

void scale_scalar(std::size_t len, cdouble a, cdouble* x) {
    for (std::size_t i = 0; i < len; ++i) x[i] *= a;
}

cdouble conj_dot_scalar(std::size_t len, const cdouble* x, const cdouble* y) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

double norm_sq_scalar(std::size_t len, const cdouble* x) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i)
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

double diff_norm_sq_scalar(std::size_t len, const cdouble* x, const cdouble* y) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double dr = x[i].real() - y[i].real();
        const double di = x[i].imag() - y[i].imag();
        s += dr * dr + di * di;
    }
    return s;
}

void pair_combine_scalar(std::size_t len, cdouble* u, cdouble* v,
                         cdouble a, cdouble b, cdouble c, cdouble d) {
    for (std::size_t i = 0; i < len; ++i) {
        const cdouble ui = u[i], vi = v[i];
        u[i] = a * ui + b * vi;
        v[i] = c * ui + d * vi;
    }
}

void matmul_scalar(int n, const cdouble* a, const cdouble* b, cdouble* c) {
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nn * nn; ++i) c[i] = 0.0;
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t k = 0; k < nn; ++k) {
            const cdouble aik = a[i * nn + k];
            if (aik == cdouble{}) continue;
            const cdouble* brow = b + k * nn;
            cdouble* crow = c + i * nn;
            for (std::size_t j = 0; j < nn; ++j) crow[j] += aik * brow[j];
        }
}

void matmul_nh_scalar(int n, const cdouble* a, const cdouble* b, cdouble* c) {
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = 0; j < nn; ++j)
            c[i * nn + j] = std::conj(conj_dot_scalar(nn, a + i * nn, b + j * nn));
}

void matmul_hn_scalar(int n, const cdouble* a, const cdouble* b, cdouble* c) {
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nn * nn; ++i) c[i] = 0.0;
    for (std::size_t k = 0; k < nn; ++k)
        for (std::size_t i = 0; i < nn; ++i) {
            const cdouble aki = std::conj(a[k * nn + i]);
            const cdouble* brow = b + k * nn;
            cdouble* crow = c + i * nn;
            for (std::size_t j = 0; j < nn; ++j) crow[j] += aki * brow[j];
        }
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend backend{
        "scalar",          axpy_scalar,      scale_scalar,
        conj_dot_scalar,   norm_sq_scalar,   diff_norm_sq_scalar,
        pair_combine_scalar, matmul_scalar,  matmul_nh_scalar,
        matmul_hn_scalar,
    };
    return backend;
}

}  // namespace qdetect::kernels
