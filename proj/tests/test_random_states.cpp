#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "qdetect/kernels.hpp"
#include "qdetect/random_states.hpp"

using namespace qdetect;

TEST_CASE("haar unitaries are unitary to tight tolerance") {
    for (int n = 1; n <= 6; ++n) {
        RandomStateSampler sampler(n, 100 + n);
        for (int rep = 0; rep < 3; ++rep) {
            const CMat u = sampler.haar_unitary();
            CMat gram = mul_hn(u, u);
            for (int i = 0; i < n; ++i) gram.at(i, i) -= 1.0;
            CHECK(std::sqrt(kernels::active().norm_sq(
                      n * n, gram.data())) <= 1e-9);
        }
    }
}

TEST_CASE("streams are reproducible and derived streams are distinct") {
    RandomStateSampler a(3, 42), b(3, 42);
    const CMat ua = a.haar_unitary();
    const CMat ub = b.haar_unitary();
    CHECK(kernels::active().diff_norm_sq(9, ua.data(), ub.data()) == 0.0);

    RandomStateSampler parent(3, 42);
    RandomStateSampler c0 = parent.derive(0);
    RandomStateSampler c1 = parent.derive(1);
    const CMat u0 = c0.haar_unitary();
    const CMat u1 = c1.haar_unitary();
    CHECK(kernels::active().diff_norm_sq(9, u0.data(), u1.data()) > 1e-6);

    // deriving must not disturb the parent stream
    RandomStateSampler fresh(3, 42);
    const CMat uf = fresh.haar_unitary();
    RandomStateSampler parent2(3, 42);
    parent2.derive(7);
    const CMat up = parent2.haar_unitary();
    CHECK(kernels::active().diff_norm_sq(9, uf.data(), up.data()) == 0.0);
}

TEST_CASE("simplex points sum to one exactly") {
    RandomStateSampler sampler(2, 7);
    for (int rep = 0; rep < 200; ++rep) {
        const std::vector<double> p = sampler.simplex_probabilities(5);
        REQUIRE(p.size() == 5);
        for (double v : p) CHECK(v >= 0.0);
        CHECK(std::accumulate(p.begin(), p.end(), 0.0) == 1.0);
    }
    CHECK(sampler.simplex_probabilities(1) == std::vector<double>{1.0});
    CHECK_THROWS_AS(sampler.simplex_probabilities(0), ValidationError);
}

TEST_CASE("pure samples are unit trace rank one") {
    RandomStateSampler sampler(4, 11);
    for (int rep = 0; rep < 5; ++rep) {
        const DensityOperator rho = sampler.sample_haar_pure();
        CHECK(std::abs(rho.op().trace() - 1.0) <= 1e-12);
        const EigenSystem es = eigen_hermitian(rho.mat());
        CHECK(std::abs(es.values.back() - 1.0) <= 1e-10);
        CHECK(std::abs(es.values[2]) <= 1e-10);
    }
    RandomStateSampler scalar(1, 11);
    CHECK(std::abs(scalar.sample_haar_pure().mat().at(0, 0).real() - 1.0) <=
          1e-14);
}

TEST_CASE("conjugation preserves the input spectrum") {
    RandomStateSampler sampler(4, 13);
    const std::vector<double> spec = {0.05, 0.15, 0.30, 0.50};
    CMat g(4);
    for (int i = 0; i < 4; ++i) g.at(i, i) = spec[i];
    const DensityOperator rho =
        sampler.sample_product_mixed(DensityOperator(HermitianOperator(g)));
    const EigenSystem es = eigen_hermitian(rho.mat());
    for (int i = 0; i < 4; ++i) CHECK(std::abs(es.values[i] - spec[i]) <= 1e-9);

    CMat mixed(3);
    for (int i = 0; i < 3; ++i) mixed.at(i, i) = 1.0 / 3.0;
    RandomStateSampler s3(3, 13);
    const DensityOperator out =
        s3.sample_product_mixed(DensityOperator(HermitianOperator(mixed)));
    CHECK(std::sqrt(kernels::active().diff_norm_sq(9, out.mat().data(),
                                                   mixed.data())) <= 1e-12);

    CHECK_THROWS_AS(s3.sample_product_mixed(
                        DensityOperator(HermitianOperator(g))),
                    DimensionError);
}

TEST_CASE("haar overlap with a fixed state averages to one over n") {
    const int n = 3;
    RandomStateSampler sampler(n, 17);
    const DensityOperator target = DensityOperator::pure({1.0, 0.0, 0.0});
    double sum = 0.0, sumsq = 0.0;
    const int samples = 20000;
    for (int k = 0; k < samples; ++k) {
        const double ov =
            trace_inner(HermitianOperator(sampler.sample_haar_pure().mat()),
                        target.op());
        sum += ov;
        sumsq += ov * ov;
    }
    const double mean = sum / samples;
    const double var = (sumsq - samples * mean * mean) / (samples - 1);
    const double se = std::sqrt(var / samples);
    CHECK(std::abs(mean - 1.0 / n) <= std::max(3.0 * se, 0.01));
}

TEST_CASE("rotation averages land on the dimension share of the trace") {
    RandomStateSampler sampler(2, 19);
    CMat proj(2);
    proj.at(0, 0) = 1.0;
    const DensityOperator g = DensityOperator::pure({0.8, 0.6});
    const McEstimate est = expected_trace_mc(
        sampler, HermitianOperator(proj), g, 20000);
    CHECK(est.samples == 20000);
    CHECK(std::abs(est.mean - 0.5) <= std::max(3.0 * est.standard_error, 0.005));

    // the identity has a deterministic trace, so the spread collapses
    RandomStateSampler s3(3, 23);
    std::vector<double> w = {0.2, 0.3, 0.5};
    CMat diag(3);
    for (int i = 0; i < 3; ++i) diag.at(i, i) = w[i];
    const McEstimate flat = expected_trace_mc(
        s3, HermitianOperator::identity(3),
        DensityOperator(HermitianOperator(diag)), 500);
    CHECK(std::abs(flat.mean - 1.0) <= 1e-10);
    CHECK(flat.standard_error <= 1e-10);

    CHECK_THROWS_AS(expected_trace_mc(s3, HermitianOperator::identity(3),
                                      DensityOperator(HermitianOperator(diag)),
                                      99),
                    ValidationError);
    CHECK_THROWS_AS(expected_trace_mc(s3, HermitianOperator::identity(2), g, 200),
                    DimensionError);
}

TEST_CASE("consecutive draws are uncorrelated") {
    RandomStateSampler sampler(2, 29);
    const int samples = 100000;
    std::vector<double> z(samples);
    for (int k = 0; k < samples; ++k)
        z[k] = sampler.sample_haar_pure().mat().at(0, 0).real();
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= samples;
    double num = 0.0, den = 0.0;
    for (int k = 0; k + 1 < samples; ++k)
        num += (z[k] - mean) * (z[k + 1] - mean);
    for (double v : z) den += (v - mean) * (v - mean);
    CHECK(std::abs(num / den) <= 0.02);
}
