#include "qdetect/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "qdetect/kernels.hpp"

namespace qdetect {

namespace {
void check_same_dim(const CMat& a, const CMat& b, const char* what) {
    if (a.dim() != b.dim())
        throw DimensionError(std::string(what) + ": dimensions " +
                             std::to_string(a.dim()) + " and " +
                             std::to_string(b.dim()) + " differ");
}
}  // namespace

CMat::CMat(int n, std::vector<cdouble> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != static_cast<std::size_t>(n) * n)
        throw DimensionError("entry count does not match dimension " +
                             std::to_string(n));
}

CMat CMat::identity(int n) {
    CMat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

CMat& CMat::operator+=(const CMat& o) {
    check_same_dim(*this, o, "matrix add");
    kernels::active().axpy(a_.size(), 1.0, o.data(), data());
    return *this;
}

CMat& CMat::operator-=(const CMat& o) {
    check_same_dim(*this, o, "matrix subtract");
    kernels::active().axpy(a_.size(), -1.0, o.data(), data());
    return *this;
}

CMat& CMat::operator*=(cdouble s) {
    kernels::active().scale(a_.size(), s, data());
    return *this;
}

CMat operator*(const CMat& a, const CMat& b) {
    check_same_dim(a, b, "matrix multiply");
    CMat c(a.dim());
    kernels::active().matmul(a.dim(), a.data(), b.data(), c.data());
    return c;
}

CMat mul_nh(const CMat& a, const CMat& b) {
    check_same_dim(a, b, "matrix multiply");
    CMat c(a.dim());
    kernels::active().matmul_nh(a.dim(), a.data(), b.data(), c.data());
    return c;
}

CMat mul_hn(const CMat& a, const CMat& b) {
    check_same_dim(a, b, "matrix multiply");
    CMat c(a.dim());
    kernels::active().matmul_hn(a.dim(), a.data(), b.data(), c.data());
    return c;
}

CMat adjoint(const CMat& a) {
    CMat c(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) c.at(i, j) = std::conj(a.at(j, i));
    return c;
}

CMat hermitize(const CMat& a) {
    CMat c(a.dim());
    for (int i = 0; i < a.dim(); ++i) {
        c.at(i, i) = a.at(i, i).real();
        for (int j = i + 1; j < a.dim(); ++j) {
            cdouble v = 0.5 * (a.at(i, j) + std::conj(a.at(j, i)));
            c.at(i, j) = v;
            c.at(j, i) = std::conj(v);
        }
    }
    return c;
}

cdouble trace(const CMat& a) {
    cdouble t = 0.0;
    for (int i = 0; i < a.dim(); ++i) t += a.at(i, i);
    return t;
}

cdouble frob_inner(const CMat& a, const CMat& b) {
    check_same_dim(a, b, "inner product");
    return kernels::active().conj_dot(a.size(), a.data(), b.data());
}

double frob_norm(const CMat& a) {
    return std::sqrt(kernels::active().norm_sq(a.size(), a.data()));
}

double frob_dist(const CMat& a, const CMat& b) {
    check_same_dim(a, b, "distance");
    return std::sqrt(kernels::active().diff_norm_sq(a.size(), a.data(), b.data()));
}

namespace {

// One two-sided rotation zeroing a[p][q], p < q. The rotation J has columns
// (b, t)/N and (-t, conj(b))/N with t = delta + hypot(delta, |b|) computed
// in a cancellation-free form. Rows are combined with the kernel, columns
// restored through Hermiticity, and the 2x2 block is set analytically.
void jacobi_rotate(CMat& a, CMat& vh, int p, int q) {
    const cdouble b = a.at(p, q);
    const double babs = std::abs(b);
    const double ap = a.at(p, p).real();
    const double aq = a.at(q, q).real();
    const double delta = 0.5 * (aq - ap);
    const double hyp = std::hypot(delta, babs);
    const double t = delta >= 0.0 ? delta + hyp : babs * babs / (hyp - delta);
    const double norm = std::sqrt(babs * babs + t * t);

    const cdouble jpp = b / norm;
    const double jqp = t / norm;

    const auto& k = kernels::active();
    const int n = a.dim();
    // rows p, q of J^dagger * A
    k.pair_combine(static_cast<std::size_t>(n), a.row(p), a.row(q),
                   std::conj(jpp), jqp, -jqp, jpp);
    for (int j = 0; j < n; ++j) {
        if (j == p || j == q) continue;
        a.at(j, p) = std::conj(a.at(p, j));
        a.at(j, q) = std::conj(a.at(q, j));
    }
    a.at(p, p) = ap + t;
    a.at(q, q) = aq - t;
    a.at(p, q) = 0.0;
    a.at(q, p) = 0.0;

    k.pair_combine(static_cast<std::size_t>(n), vh.row(p), vh.row(q),
                   std::conj(jpp), jqp, -jqp, jpp);
}

double offdiag_norm(const CMat& a) {
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (int j = i + 1; j < a.dim(); ++j) s += std::norm(a.at(i, j));
    return std::sqrt(2.0 * s);
}

}  // namespace

EigenSystem eigen_hermitian(const CMat& input) {
    const int n = input.dim();
    EigenSystem out;
    if (n == 0) return out;

    CMat a = hermitize(input);
    CMat vh = CMat::identity(n);

    if (n > 1) {
        const double scale = std::max(1.0, frob_norm(a));
        const double target = 1e-15 * scale;
        const double skip = target / (10.0 * n);
        double prev = std::numeric_limits<double>::infinity();
        for (int sweep = 0; sweep < 100; ++sweep) {
            // stop at the tolerance or at the rounding floor, whichever first
            const double off = offdiag_norm(a);
            if (off <= target || off >= prev) break;
            prev = off;
            for (int p = 0; p < n - 1; ++p)
                for (int q = p + 1; q < n; ++q)
                    if (std::abs(a.at(p, q)) > skip) jacobi_rotate(a, vh, p, q);
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        return a.at(x, x).real() < a.at(y, y).real();
    });

    out.values.resize(n);
    out.vectors = CMat(n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = a.at(order[k], order[k]).real();
        for (int r = 0; r < n; ++r)
            out.vectors.at(r, k) = std::conj(vh.at(order[k], r));
    }
    return out;
}

CMat eigen_assemble(const CMat& vectors, const std::vector<double>& values) {
    const int n = vectors.dim();
    if (values.size() != static_cast<std::size_t>(n))
        throw DimensionError("eigenvalue count does not match basis dimension");
    CMat scaled = vectors;
    for (int k = 0; k < n; ++k)
        for (int r = 0; r < n; ++r) scaled.at(r, k) *= values[k];
    return mul_nh(scaled, vectors);
}

}  // namespace qdetect
