#include <cmath>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "qdetect/average.hpp"
#include "qdetect/scenario.hpp"

using namespace qdetect;

namespace {

std::vector<DensityOperator> trine_states() {
    const double pi = std::acos(-1.0);
    std::vector<DensityOperator> out;
    for (int k = 0; k < 3; ++k) {
        const double half = pi * k / 3.0;
        out.push_back(DensityOperator::pure({std::cos(half), std::sin(half)}));
    }
    return out;
}

UncertainEnsemble trine_ensemble(std::vector<double> qs) {
    return UncertainEnsemble(trine_states(),
                             {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
                             std::move(qs));
}

}  // namespace

TEST_CASE("effective states mix the nominal with the maximally mixed") {
    const DensityOperator e0 = DensityOperator::pure({1.0, 0.0});
    const DensityOperator e1 = DensityOperator::pure({0.0, 1.0});

    const AverageProblem half =
        effective_states(UncertainEnsemble({e0, e1}, {0.6, 0.4}, {0.5, 1.0}));
    CHECK(std::abs(half.states[0].mat().at(0, 0).real() - 0.75) <= 1e-15);
    CHECK(std::abs(half.states[0].mat().at(1, 1).real() - 0.25) <= 1e-15);
    CHECK(frobenius_distance({HermitianOperator(half.states[1].mat())},
                             {HermitianOperator(e1.mat())}) == 0.0);
    CHECK(half.priors == std::vector<double>{0.6, 0.4});

    const AverageProblem none =
        effective_states(UncertainEnsemble({e0, e1}, {0.6, 0.4}, {0.0, 1.0}));
    CHECK(none.states[0].mat().at(0, 0) == cdouble(0.5, 0.0));
    CHECK(none.states[0].mat().at(1, 1) == cdouble(0.5, 0.0));
    CHECK(none.states[0].mat().at(0, 1) == cdouble(0.0, 0.0));
}

TEST_CASE("fully known ensembles reproduce the nominal design exactly") {
    const DesignSolution avg = design_average(fixtures::three_ensemble(1.0));
    const DesignSolution nom = solve_nominal(
        DetectionProblem(fixtures::three_states(), fixtures::three_priors()),
        1e-8);
    CHECK(avg.value == nom.value);
    CHECK(frobenius_distance(avg.povm, nom.povm) == 0.0);
}

TEST_CASE("fully uncertain ensembles average to the guess value") {
    const DesignSolution avg = design_average(fixtures::three_ensemble(0.0));
    CHECK(avg.converged);
    CHECK(std::abs(avg.value - 0.5) <= 1e-7);
}

TEST_CASE("average value dominates the guess and grows with the bounds") {
    double prev = 0.0;
    for (double q : {0.2, 0.5, 0.8}) {
        const DesignSolution avg = design_average(fixtures::three_ensemble(q));
        CHECK(avg.converged);
        CHECK(avg.value >= 0.5 - 1e-8);
        CHECK(avg.value >= prev - 1e-9);
        prev = avg.value;
    }
}

TEST_CASE("equiprobable ensembles reuse the nominal measurement") {
    const UncertainEnsemble ens = trine_ensemble({0.3, 0.3, 0.3});
    const EquiprobableShortcut sc = equiprobable_shortcut(ens);
    REQUIRE(sc.applicable);
    REQUIRE(sc.povm.has_value());

    const DesignSolution nom =
        solve_nominal(DetectionProblem(trine_states(),
                                       {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}),
                      1e-8);
    CHECK(std::abs(nom.value - 2.0 / 3.0) <= 1e-7);

    const double derived = 0.3 * nom.value + 0.7 / 3.0;
    const DesignSolution avg = design_average(ens);
    CHECK(std::abs(avg.value - derived) <= 1e-7);
    CHECK(std::abs(evaluate(*sc.povm, ens, Realization::maximally_mixed()) -
                   avg.value) <= 1e-7);
}

TEST_CASE("shortcut stays out of non equiprobable or untrusted cases") {
    CHECK(!equiprobable_shortcut(fixtures::three_ensemble(0.3)).applicable);
    CHECK(!equiprobable_shortcut(trine_ensemble({0.0, 0.0, 0.0})).applicable);
    CHECK(!equiprobable_shortcut(trine_ensemble({0.3, 0.3, 0.4})).applicable);
}

TEST_CASE("measurement weights summarize outcome geometry") {
    const UncertainEnsemble ens = fixtures::three_ensemble(0.9);
    const MeasurementWeights gw =
        measurement_weights(guess_measurement(fixtures::three_priors(), 3), ens);
    CHECK(gw.sigma[0] == 0.0);
    CHECK(gw.sigma[1] == 0.0);
    CHECK(std::abs(gw.sigma[2] - 3.0) <= 1e-12);
    CHECK(!gw.shapes[0].has_value());
    CHECK(!gw.shapes[1].has_value());
    REQUIRE(gw.shapes[2].has_value());
    CHECK(std::abs(gw.shapes[2]->trace() - 1.0) <= 1e-12);
    CHECK(std::abs(gw.outcome_probabilities[2] - 1.0) <= 1e-12);
    CHECK(std::abs(gw.outcome_probabilities[0]) <= 1e-12);

    const DensityOperator e0 = DensityOperator::pure({1.0, 0.0});
    const DensityOperator e1 = DensityOperator::pure({0.0, 1.0});
    const UncertainEnsemble pair({e0, e1}, {0.6, 0.4}, {0.9, 0.9});
    HermitianOperator split = HermitianOperator::identity(2);
    CMat sm = split.mat();
    sm *= 0.5;
    const Povm coin({HermitianOperator(sm), HermitianOperator(sm)});
    const MeasurementWeights cw = measurement_weights(coin, pair);
    double total_sigma = 0.0, total_p = 0.0;
    for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(cw.sigma[i] - 1.0) <= 1e-12);
        CHECK(std::abs(cw.outcome_probabilities[i] - 0.5) <= 1e-12);
        total_sigma += cw.sigma[i];
        total_p += cw.outcome_probabilities[i];
    }
    CHECK(std::abs(total_sigma - 2.0) <= 1e-12);
    CHECK(std::abs(total_p - 1.0) <= 1e-8);

    CHECK_THROWS_AS(measurement_weights(coin, ens), DimensionError);
}
