#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "qdetect/hermitian.hpp"
#include "qdetect/random_states.hpp"
#include "qdetect/solver.hpp"

// Shared inputs for the test suites: the three pure states on C^3 with
// priors (0.2, 0.3, 0.5) used throughout as the reference discrimination
// instance, plus seeded random instance generators.

namespace fixtures {

// optimal nominal detection probability of the reference instance, pinned
// from an independently certified solve
inline constexpr double kThreeStateNominal = 0.882432492515219;
// p_max / kThreeStateNominal, the uniform-q value where the worst-case
// design stops guessing
inline constexpr double kThreeStateThreshold = 0.566615581634849;

inline std::vector<qdetect::DensityOperator> three_states() {
    using qdetect::cdouble;
    using qdetect::CMat;
    CMat r1(3), r2(3), r3(3);
    r1.at(0, 0) = 0.2;
    r1.at(0, 2) = -0.4;
    r1.at(2, 0) = -0.4;
    r1.at(2, 2) = 0.8;
    r2.at(0, 0) = 0.8;
    r2.at(0, 1) = cdouble(0.0, -0.4);
    r2.at(1, 0) = cdouble(0.0, 0.4);
    r2.at(1, 1) = 0.2;
    r3.at(1, 1) = 0.5;
    r3.at(1, 2) = -0.5;
    r3.at(2, 1) = -0.5;
    r3.at(2, 2) = 0.5;
    std::vector<qdetect::DensityOperator> out;
    out.emplace_back(qdetect::HermitianOperator(r1));
    out.emplace_back(qdetect::HermitianOperator(r2));
    out.emplace_back(qdetect::HermitianOperator(r3));
    return out;
}

inline std::vector<double> three_priors() { return {0.2, 0.3, 0.5}; }

inline qdetect::UncertainEnsemble three_ensemble(double q) {
    return qdetect::UncertainEnsemble(three_states(), three_priors(),
                                      {q, q, q});
}

inline std::vector<double> positive_simplex(qdetect::RandomStateSampler& s,
                                            int m) {
    std::vector<double> p;
    do {
        p = s.simplex_probabilities(m);
    } while (*std::min_element(p.begin(), p.end()) <= 0.0);
    return p;
}

inline qdetect::DensityOperator random_mixed_state(
    qdetect::RandomStateSampler& s) {
    const int n = s.dim();
    const std::vector<double> spec = s.simplex_probabilities(n);
    qdetect::CMat g(n);
    for (int i = 0; i < n; ++i) g.at(i, i) = spec[i];
    return s.sample_product_mixed(
        qdetect::DensityOperator(qdetect::HermitianOperator(g)));
}

inline qdetect::DetectionProblem random_problem(qdetect::RandomStateSampler& s,
                                                int m) {
    std::vector<qdetect::DensityOperator> states;
    states.reserve(m);
    for (int i = 0; i < m; ++i) states.push_back(random_mixed_state(s));
    return qdetect::DetectionProblem(std::move(states), positive_simplex(s, m));
}

inline qdetect::UncertainEnsemble random_ensemble(qdetect::RandomStateSampler& s,
                                                  int m,
                                                  std::vector<double> qs) {
    std::vector<qdetect::DensityOperator> states;
    states.reserve(m);
    for (int i = 0; i < m; ++i) states.push_back(random_mixed_state(s));
    return qdetect::UncertainEnsemble(std::move(states), positive_simplex(s, m),
                                      std::move(qs));
}

}  // namespace fixtures
