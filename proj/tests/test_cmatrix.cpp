#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "qdetect/cmatrix.hpp"

using qdetect::cdouble;
using qdetect::CMat;

namespace {

CMat random_hermitian(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    CMat a(n);
    for (int i = 0; i < n; ++i) {
        a.at(i, i) = u(rng);
        for (int j = i + 1; j < n; ++j) {
            a.at(i, j) = cdouble(u(rng), u(rng));
            a.at(j, i) = std::conj(a.at(i, j));
        }
    }
    return a;
}

}  // namespace

TEST_CASE("basic arithmetic and adjoints") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 4;
    CMat a(n), b(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a.at(i, j) = cdouble(u(rng), u(rng));
            b.at(i, j) = cdouble(u(rng), u(rng));
        }

    const CMat ab = a * b;
    const CMat nh = mul_nh(a, adjoint(b));
    CHECK(qdetect::frob_dist(ab, nh) <= 1e-13);
    const CMat hn = mul_hn(adjoint(a), b);
    CHECK(qdetect::frob_dist(ab, hn) <= 1e-13);

    const CMat h = qdetect::hermitize(a);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(h.at(i, j) == std::conj(h.at(j, i)));

    CHECK(std::abs(qdetect::trace(CMat::identity(n)) - cdouble(n, 0)) == 0.0);
    CHECK(std::abs(qdetect::frob_inner(a, b) -
                   qdetect::trace(adjoint(a) * b)) <= 1e-12);
}

TEST_CASE("eigendecomposition reconstructs the matrix") {
    std::mt19937_64 rng(22);
    for (int n : {1, 2, 3, 4, 5, 6}) {
        for (int rep = 0; rep < 4; ++rep) {
            const CMat a = random_hermitian(rng, n, rep == 3 ? 1e3 : 1.0);
            const qdetect::EigenSystem es = qdetect::eigen_hermitian(a);

            REQUIRE(static_cast<int>(es.values.size()) == n);
            CHECK(std::is_sorted(es.values.begin(), es.values.end()));

            const CMat vhv = mul_hn(es.vectors, es.vectors);
            CHECK(qdetect::frob_dist(vhv, CMat::identity(n)) <= 1e-12 * n);

            const CMat back = qdetect::eigen_assemble(es.vectors, es.values);
            const double bound =
                1e-10 * std::max(1.0, qdetect::frob_norm(a));
            CHECK(qdetect::frob_dist(back, a) <= bound);
        }
    }
}

TEST_CASE("known spectra") {
    CMat x(2);
    x.at(0, 1) = 1.0;
    x.at(1, 0) = 1.0;
    auto es = qdetect::eigen_hermitian(x);
    CHECK(es.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(es.values[1] == doctest::Approx(1.0).epsilon(1e-14));

    CMat y(2);
    y.at(0, 1) = cdouble(0.0, -1.0);
    y.at(1, 0) = cdouble(0.0, 1.0);
    es = qdetect::eigen_hermitian(y);
    CHECK(es.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(es.values[1] == doctest::Approx(1.0).epsilon(1e-14));

    CMat d(3);
    d.at(0, 0) = 0.7;
    d.at(1, 1) = -0.2;
    d.at(2, 2) = 0.1;
    es = qdetect::eigen_hermitian(d);
    CHECK(es.values[0] == -0.2);
    CHECK(es.values[1] == 0.1);
    CHECK(es.values[2] == 0.7);
}

TEST_CASE("eigenvectors satisfy the eigen equation") {
    std::mt19937_64 rng(23);
    const int n = 5;
    const CMat a = random_hermitian(rng, n);
    const auto es = qdetect::eigen_hermitian(a);
    for (int k = 0; k < n; ++k) {
        std::vector<cdouble> v(n), av(n);
        for (int i = 0; i < n; ++i) v[i] = es.vectors.at(i, k);
        for (int i = 0; i < n; ++i) {
            cdouble s{};
            for (int j = 0; j < n; ++j) s += a.at(i, j) * v[j];
            av[i] = s;
        }
        double resid = 0.0;
        for (int i = 0; i < n; ++i)
            resid += std::norm(av[i] - es.values[k] * v[i]);
        CHECK(std::sqrt(resid) <= 1e-12 * std::max(1.0, qdetect::frob_norm(a)));
    }
}

TEST_CASE("degenerate spectra are handled") {
    // projector onto a two dimensional subspace has eigenvalues {0, 1, 1}
    std::mt19937_64 rng(24);
    const int n = 3;
    CMat q = random_hermitian(rng, n);
    auto es = qdetect::eigen_hermitian(q);
    std::vector<double> proj = {0.0, 1.0, 1.0};
    const CMat p = qdetect::eigen_assemble(es.vectors, proj);
    auto es2 = qdetect::eigen_hermitian(p);
    CHECK(std::abs(es2.values[0]) <= 1e-12);
    CHECK(es2.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(es2.values[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(qdetect::frob_dist(p * p, p) <= 1e-12);
}
