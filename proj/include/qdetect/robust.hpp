#pragma once

#include <optional>
#include <vector>

#include "qdetect/solver.hpp"

namespace qdetect {

// Surrogate discrimination problem whose nominal optimum yields the
// worst-case optimal measurement: the known states weighted by
// p_i q_i / eta with eta = sum_i p_i q_i.
struct EffectiveEnsemble {
    std::vector<DensityOperator> states;
    std::vector<double> priors;  // empty when degenerate
    double eta = 0.0;
    bool degenerate = false;     // eta = 0: every state fully uncertain
};

enum class Regime { EFFECTIVE, GUESS };

struct RobustDesign {
    Povm chosen_povm;
    Regime regime;
    double worst_case_value;   // max(p_max, eta * P_tilde)
    double threshold_margin;   // eta * P_tilde - p_max
    std::optional<DesignSolution> effective_solution;
    WorstCaseSolution program_solution;  // direct solve, used as cross-check
    bool converged;
};

EffectiveEnsemble effective_priors(const UncertainEnsemble& ensemble);

// State-independent measurement achieving p_max on any realization: weight
// I/m_max on each maximal-prior outcome (ties within 1e-12), zero elsewhere.
Povm guess_measurement(const std::vector<double>& priors, int dim);

// Solve the effective-ensemble nominal problem, pick its measurement when it
// beats the guess value and the guess measurement otherwise (ties go to the
// guess). The result is cross-checked against the direct worst-case program.
RobustDesign design_worst_case(const UncertainEnsemble& ensemble,
                               double tol = 1e-8);

// Closed-form worst-case optimum for mutually orthogonal known states
// (pairwise overlap within 1e-9): max(p_max, eta) when every q_i > 0, and
// max(p_max, eta * (1 - P_0 + p_0)) when some q_i = 0, with P_0 the total
// and p_0 the largest prior among the q_i = 0 states. The printed q_i = 0
// form is only exact when at most one q_i vanishes; with two or more it
// undercuts the true optimum and is a lower bound.
double orthogonal_worst_case_value(const UncertainEnsemble& ensemble);

// For uniform uncertainty q_i = q the design switches from the guess
// measurement to the nominal one at q* = p_max / P_d^Nom; bounds stored in
// the ensemble are ignored.
double uniform_threshold(const UncertainEnsemble& ensemble, double tol = 1e-8);

}  // namespace qdetect
