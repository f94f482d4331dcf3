#include "qdetect/random_states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdetect/errors.hpp"
#include "qdetect/kernels.hpp"

namespace qdetect {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

RandomStateSampler::RandomStateSampler(int dim, std::uint64_t seed)
    : dim_(dim), seed_(seed), rng_(splitmix64(seed)) {
    if (dim < 1) throw ValidationError("sampler dimension must be positive");
}

RandomStateSampler RandomStateSampler::derive(std::uint64_t stream) const {
    return RandomStateSampler(
        dim_, splitmix64(seed_ ^ (0x9E3779B97F4A7C15ULL * (stream + 1))));
}

CMat RandomStateSampler::haar_unitary() {
    const int n = dim_;
    const auto& kern = kernels::active();
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMat u(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            u.at(i, j) = cdouble(gauss(rng_), gauss(rng_));
    for (int i = 0; i < n; ++i) {
        cdouble* row = u.row(i);
        // Gram-Schmidt keeps the implicit triangular factor's diagonal
        // positive, which is exactly the phase convention Haar needs.
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < i; ++j) {
                const cdouble r = kern.conj_dot(n, u.row(j), row);
                kern.axpy(n, -r, u.row(j), row);
            }
        const double norm = std::sqrt(kern.norm_sq(n, row));
        if (norm > 0.0) {
            kern.scale(n, cdouble(1.0 / norm, 0.0), row);
        } else {
            for (int j = 0; j < n; ++j) row[j] = (j == i) ? 1.0 : 0.0;
        }
    }
    return u;
}

DensityOperator RandomStateSampler::sample_haar_pure() {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cdouble> amps(dim_);
    for (auto& a : amps) a = cdouble(gauss(rng_), gauss(rng_));
    return DensityOperator::pure(amps);
}

std::vector<double> RandomStateSampler::simplex_probabilities(int n) {
    if (n < 1) throw ValidationError("simplex dimension must be positive");
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> y(n);
    double total = 0.0;
    do {
        total = 0.0;
        for (auto& v : y) {
            v = exp1(rng_);
            total += v;
        }
    } while (!(total > 0.0));
    std::vector<double> out(n);
    double partial = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        out[k] = y[k] / total;
        partial += out[k];
    }
    out[n - 1] = std::max(0.0, 1.0 - partial);
    return out;
}

DensityOperator RandomStateSampler::sample_product_mixed(
    const DensityOperator& g) {
    if (g.dim() != dim_)
        throw DimensionError("state dimension " + std::to_string(g.dim()) +
                             " does not match sampler dimension " +
                             std::to_string(dim_));
    const CMat u = haar_unitary();
    return DensityOperator(HermitianOperator(hermitize(mul_nh(u * g.mat(), u))));
}

McEstimate expected_trace_mc(RandomStateSampler& sampler,
                             const HermitianOperator& pi,
                             const DensityOperator& g, int samples) {
    if (samples < 100) throw ValidationError("need at least 100 samples");
    if (pi.dim() != sampler.dim() || g.dim() != sampler.dim())
        throw DimensionError("operator dimensions do not match the sampler");
    const auto& kern = kernels::active();
    const std::size_t nn = static_cast<std::size_t>(sampler.dim()) * sampler.dim();
    double mean = 0.0, m2 = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const CMat u = sampler.haar_unitary();
        // Tr(pi U G U*) written as the Frobenius pairing of U with pi U G,
        // skipping the per-sample density operator round trip.
        const CMat b = pi.mat() * (u * g.mat());
        const double val = kern.conj_dot(nn, u.data(), b.data()).real();
        const double d1 = val - mean;
        mean += d1 / k;
        m2 += d1 * (val - mean);
    }
    const double se = std::sqrt(
        std::max(0.0, m2) / (static_cast<double>(samples - 1) * samples));
    return McEstimate{mean, se, samples};
}

}  // namespace qdetect
