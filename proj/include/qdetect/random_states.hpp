#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qdetect/hermitian.hpp"

namespace qdetect {

// Seeded Haar-measure sampler. One sampler owns one deterministic stream;
// derive() splits off statistically independent child streams so parallel
// consumers never share generator state.
class RandomStateSampler {
public:
    RandomStateSampler(int dim, std::uint64_t seed);

    int dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }

    // Independent child sampler for the given stream index.
    RandomStateSampler derive(std::uint64_t stream) const;

    // Haar-distributed unitary: complex Gaussian rows orthonormalized by
    // modified Gram-Schmidt with a re-orthogonalization pass.
    CMat haar_unitary();

    // |mu><mu| with |mu> uniform on the unit sphere.
    DensityOperator sample_haar_pure();

    // Point on the (n-1)-simplex from normalized exponential draws. The last
    // component is fixed so a left-to-right sum gives exactly one.
    std::vector<double> simplex_probabilities(int n);

    // U G U* with Haar U; the spectrum of G is preserved.
    DensityOperator sample_product_mixed(const DensityOperator& g);

private:
    int dim_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
};

struct McEstimate {
    double mean = 0;
    double standard_error = 0;
    int samples = 0;
};

// Monte Carlo mean of Tr(pi U G U*) over Haar U, with standard error.
// Requires at least 100 samples.
McEstimate expected_trace_mc(RandomStateSampler& sampler,
                             const HermitianOperator& pi,
                             const DensityOperator& g, int samples);

}  // namespace qdetect
