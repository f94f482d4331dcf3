#include "qdetect/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

// Complex doubles are processed two at a time as [re0, im0, re1, im1].
// A complex product (ar+i*ai)*(xr+i*xi) is formed with one in-lane swap and
// one fmaddsub: even lanes ar*xr - ai*xi, odd lanes ar*xi + ai*xr.

namespace qdetect::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline __m256d cmul(__m256d ar, __m256d ai, __m256d z) {
    __m256d zswap = _mm256_permute_pd(z, 0x5);
    return _mm256_fmaddsub_pd(ar, z, _mm256_mul_pd(ai, zswap));
}

void axpy_avx2(std::size_t len, cdouble a, const cdouble* x, cdouble* y) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    auto* xd = reinterpret_cast<const double*>(x);
    auto* yd = reinterpret_cast<double*>(y);
    for (; i + 2 <= len; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul(ar, ai, xv)));
    }
    for (; i < len; ++i) y[i] += a * x[i];
}

void scale_avx2(std::size_t len, cdouble a, cdouble* x) {
    const __m256d ar = _mm256_set1_pd(a.real());
    const __m256d ai = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    auto* xd = reinterpret_cast<double*>(x);
    for (; i + 2 <= len; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        _mm256_storeu_pd(xd + 2 * i, cmul(ar, ai, xv));
    }
    for (; i < len; ++i) x[i] *= a;
}

cdouble conj_dot_avx2(std::size_t len, const cdouble* x, const cdouble* y) {
    // Negating the odd (imaginary) lanes of x turns fmadd over swapped y
    // into the imaginary part of conj(x)*y.
    const __m256d negodd = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t i = 0;
    auto* xd = reinterpret_cast<const double*>(x);
    auto* yd = reinterpret_cast<const double*>(y);
    for (; i + 2 <= len; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        acc_re = _mm256_fmadd_pd(xv, yv, acc_re);
        __m256d xconj = _mm256_xor_pd(xv, negodd);
        __m256d yswap = _mm256_permute_pd(yv, 0x5);
        acc_im = _mm256_fmadd_pd(xconj, yswap, acc_im);
    }
    double re = hsum(acc_re), im = hsum(acc_im);
    for (; i < len; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        const double yr = y[i].real(), yi = y[i].imag();
        re += xr * yr + xi * yi;
        im += xr * yi - xi * yr;
    }
    return {re, im};
}

double norm_sq_avx2(std::size_t len, const cdouble* x) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    auto* xd = reinterpret_cast<const double*>(x);
    for (; i + 2 <= len; i += 2) {
        __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        acc = _mm256_fmadd_pd(xv, xv, acc);
    }
    double s = hsum(acc);
    for (; i < len; ++i)
        s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

double diff_norm_sq_avx2(std::size_t len, const cdouble* x, const cdouble* y) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    auto* xd = reinterpret_cast<const double*>(x);
    auto* yd = reinterpret_cast<const double*>(y);
    for (; i + 2 <= len; i += 2) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(xd + 2 * i),
                                  _mm256_loadu_pd(yd + 2 * i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < len; ++i) {
        const double dr = x[i].real() - y[i].real();
        const double di = x[i].imag() - y[i].imag();
        s += dr * dr + di * di;
    }
    return s;
}

void pair_combine_avx2(std::size_t len, cdouble* u, cdouble* v,
                       cdouble a, cdouble b, cdouble c, cdouble d) {
    const __m256d ar = _mm256_set1_pd(a.real()), ai = _mm256_set1_pd(a.imag());
    const __m256d br = _mm256_set1_pd(b.real()), bi = _mm256_set1_pd(b.imag());
    const __m256d cr = _mm256_set1_pd(c.real()), ci = _mm256_set1_pd(c.imag());
    const __m256d dr = _mm256_set1_pd(d.real()), di = _mm256_set1_pd(d.imag());
    std::size_t i = 0;
    auto* ud = reinterpret_cast<double*>(u);
    auto* vd = reinterpret_cast<double*>(v);
    for (; i + 2 <= len; i += 2) {
        __m256d uv = _mm256_loadu_pd(ud + 2 * i);
        __m256d vv = _mm256_loadu_pd(vd + 2 * i);
        __m256d nu = _mm256_add_pd(cmul(ar, ai, uv), cmul(br, bi, vv));
        __m256d nv = _mm256_add_pd(cmul(cr, ci, uv), cmul(dr, di, vv));
        _mm256_storeu_pd(ud + 2 * i, nu);
        _mm256_storeu_pd(vd + 2 * i, nv);
    }
    for (; i < len; ++i) {
        const cdouble ui = u[i], vi = v[i];
        u[i] = a * ui + b * vi;
        v[i] = c * ui + d * vi;
    }
}

void row_axpy(std::size_t n, cdouble coeff, const cdouble* brow, cdouble* crow) {
    const __m256d ar = _mm256_set1_pd(coeff.real());
    const __m256d ai = _mm256_set1_pd(coeff.imag());
    auto* bd = reinterpret_cast<const double*>(brow);
    auto* cd = reinterpret_cast<double*>(crow);
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
        __m256d bv = _mm256_loadu_pd(bd + 2 * j);
        __m256d cv = _mm256_loadu_pd(cd + 2 * j);
        _mm256_storeu_pd(cd + 2 * j, _mm256_add_pd(cv, cmul(ar, ai, bv)));
    }
    for (; j < n; ++j) crow[j] += coeff * brow[j];
}

void matmul_avx2(int n, const cdouble* a, const cdouble* b, cdouble* c) {
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nn * nn; ++i) c[i] = 0.0;
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t k = 0; k < nn; ++k)
            row_axpy(nn, a[i * nn + k], b + k * nn, c + i * nn);
}

void matmul_nh_avx2(int n, const cdouble* a, const cdouble* b, cdouble* c) {
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t j = 0; j < nn; ++j)
            c[i * nn + j] = std::conj(conj_dot_avx2(nn, a + i * nn, b + j * nn));
}

void matmul_hn_avx2(int n, const cdouble* a, const cdouble* b, cdouble* c) {
    const std::size_t nn = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < nn * nn; ++i) c[i] = 0.0;
    for (std::size_t k = 0; k < nn; ++k)
        for (std::size_t i = 0; i < nn; ++i)
            row_axpy(nn, std::conj(a[k * nn + i]), b + k * nn, c + i * nn);
}

}  // namespace

const Backend* avx2_backend() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
        return nullptr;
    static const Backend backend{
        "avx2",          axpy_avx2,      scale_avx2,
        conj_dot_avx2,   norm_sq_avx2,   diff_norm_sq_avx2,
        pair_combine_avx2, matmul_avx2,  matmul_nh_avx2,
        matmul_hn_avx2,
    };
    return &backend;
}

}  // namespace qdetect::kernels

#else

namespace qdetect::kernels {
const Backend* avx2_backend() { return nullptr; }
}  // namespace qdetect::kernels

#endif
