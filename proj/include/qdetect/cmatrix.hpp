#pragma once

#include <complex>
#include <vector>

#include "qdetect/errors.hpp"

// Dense square complex matrices, row-major, backed by the kernel layer.
// This is the raw arithmetic type; domain invariants (Hermiticity, PSD,
// unit trace) live in hermitian.hpp.

namespace qdetect {

using cdouble = std::complex<double>;

class CMat {
public:
    CMat() = default;
    explicit CMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}
    CMat(int n, std::vector<cdouble> entries);

    static CMat identity(int n);

    int dim() const { return n_; }
    bool empty() const { return n_ == 0; }

    cdouble& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const cdouble& at(int i, int j) const {
        return a_[static_cast<std::size_t>(i) * n_ + j];
    }
    cdouble* data() { return a_.data(); }
    const cdouble* data() const { return a_.data(); }
    cdouble* row(int i) { return a_.data() + static_cast<std::size_t>(i) * n_; }
    const cdouble* row(int i) const {
        return a_.data() + static_cast<std::size_t>(i) * n_;
    }
    std::size_t size() const { return a_.size(); }

    CMat& operator+=(const CMat& o);
    CMat& operator-=(const CMat& o);
    CMat& operator*=(cdouble s);

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(cdouble s, CMat a) { return a *= s; }
    friend CMat operator*(const CMat& a, const CMat& b);  // matrix product

private:
    int n_ = 0;
    std::vector<cdouble> a_;
};

// C = A * B^dagger and C = A^dagger * B.
CMat mul_nh(const CMat& a, const CMat& b);
CMat mul_hn(const CMat& a, const CMat& b);

CMat adjoint(const CMat& a);
// (A + A^dagger) / 2
CMat hermitize(const CMat& a);

cdouble trace(const CMat& a);
// Tr(A^dagger B), the Frobenius inner product
cdouble frob_inner(const CMat& a, const CMat& b);
double frob_norm(const CMat& a);
double frob_dist(const CMat& a, const CMat& b);

struct EigenSystem {
    std::vector<double> values;  // ascending
    CMat vectors;                // column k is the eigenvector for values[k]
};

// Cyclic Jacobi diagonalization of a Hermitian matrix (the strict upper
// triangle of a is trusted; the input is hermitized first).
EigenSystem eigen_hermitian(const CMat& a);

// V * diag(values) * V^dagger for the given eigenbasis; used to apply
// spectral functions such as square roots.
CMat eigen_assemble(const CMat& vectors, const std::vector<double>& values);

}  // namespace qdetect
