#pragma once

#include <optional>
#include <vector>

#include "qdetect/solver.hpp"

namespace qdetect {

// Surrogate problem for the average criterion: each partially known state
// replaced by its mean over the uncertainty, q_i rho_i^0 + ((1-q_i)/n) I.
struct AverageProblem {
    std::vector<DensityOperator> states;
    std::vector<double> priors;

    DetectionProblem problem() const {
        return DetectionProblem(states, priors);
    }
};

// Per-outcome geometry of a measurement: weight sigma_i = Tr(Pi_i), unit
// trace shape Psi_i where the weight is positive, and the outcome
// distribution against the nominal states.
struct MeasurementWeights {
    std::vector<double> sigma;
    std::vector<std::optional<HermitianOperator>> shapes;
    std::vector<double> outcome_probabilities;
};

struct EquiprobableShortcut {
    bool applicable = false;
    std::optional<Povm> povm;
};

AverageProblem effective_states(const UncertainEnsemble& ensemble);

// Average-optimal design. A nominal solve on the effective states; the
// reported value is the expected detection probability over the uncertainty.
DesignSolution design_average(const UncertainEnsemble& ensemble,
                              double tol = 1e-8);

MeasurementWeights measurement_weights(const Povm& povm,
                                       const UncertainEnsemble& ensemble);

// Equal priors with a common positive q: the nominal measurement is already
// average optimal, so no second solve is needed.
EquiprobableShortcut equiprobable_shortcut(const UncertainEnsemble& ensemble,
                                           double tol = 1e-8);

}  // namespace qdetect
