#include "qdetect/robust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qdetect {

EffectiveEnsemble effective_priors(const UncertainEnsemble& ensemble) {
    EffectiveEnsemble out;
    out.states = ensemble.states();
    const int m = ensemble.size();
    double eta = 0.0;
    for (int i = 0; i < m; ++i)
        eta += ensemble.priors()[i] * ensemble.bounds()[i];
    out.eta = eta;
    if (eta <= 0.0) {
        out.degenerate = true;
        return out;
    }
    bool uniform = true;
    for (int i = 1; i < m; ++i)
        if (ensemble.bounds()[i] != ensemble.bounds()[0]) uniform = false;
    if (uniform) {
        // p_i q / (q sum_j p_j) is just p_i; copying verbatim keeps the
        // effective problem bitwise identical to the nominal one
        out.priors = ensemble.priors();
    } else {
        out.priors.reserve(m);
        for (int i = 0; i < m; ++i)
            out.priors.push_back(ensemble.priors()[i] * ensemble.bounds()[i] /
                                 eta);
    }
    return out;
}

Povm guess_measurement(const std::vector<double>& priors, int dim) {
    if (priors.empty()) throw ValidationError("guess measurement needs priors");
    double total = 0.0, pmax = 0.0;
    for (double p : priors) {
        if (p < 0.0) throw ValidationError("priors must be nonnegative");
        total += p;
        pmax = std::max(pmax, p);
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw ValidationError("priors sum to " + std::to_string(total));

    int mmax = 0;
    for (double p : priors)
        if (p >= pmax - 1e-12) ++mmax;
    std::vector<HermitianOperator> ops;
    ops.reserve(priors.size());
    for (double p : priors) {
        if (p >= pmax - 1e-12) {
            CMat share = CMat::identity(dim);
            share *= 1.0 / mmax;
            ops.emplace_back(share);
        } else {
            ops.push_back(HermitianOperator::zero(dim));
        }
    }
    return Povm(std::move(ops));
}

RobustDesign design_worst_case(const UncertainEnsemble& ensemble, double tol) {
    const double pmax = ensemble.max_prior();
    const EffectiveEnsemble eff = effective_priors(ensemble);

    WorstCaseSolution program = solve_worst_case_program(ensemble, tol);

    if (eff.degenerate) {
        Povm guess = guess_measurement(ensemble.priors(), ensemble.dim());
        if (program.converged && std::abs(program.value - pmax) > 10.0 * tol)
            throw ConvergenceError("worst-case cross-check failed: program value " +
                        std::to_string(program.value) + " vs guess value " +
                        std::to_string(pmax));
        const bool ok = program.converged;
        return RobustDesign{std::move(guess), Regime::GUESS, pmax,
                            -pmax,            std::nullopt,  std::move(program),
                            ok};
    }

    DesignSolution eff_sol =
        solve_nominal(DetectionProblem(eff.states, eff.priors), tol);
    const double scaled = eff.eta * eff_sol.value;
    const double margin = scaled - pmax;
    const bool converged = eff_sol.converged && program.converged;

    double value;
    Regime regime;
    Povm chosen = eff_sol.povm;
    if (scaled > pmax) {
        regime = Regime::EFFECTIVE;
        value = scaled;
    } else {
        regime = Regime::GUESS;
        value = pmax;
        chosen = guess_measurement(ensemble.priors(), ensemble.dim());
    }
    if (converged && std::abs(program.value - value) > 10.0 * tol)
        throw ConvergenceError("worst-case cross-check failed: program value " +
                    std::to_string(program.value) + " vs reduction value " +
                    std::to_string(value));
    return RobustDesign{std::move(chosen), regime,
                        value,             margin,
                        std::move(eff_sol), std::move(program),
                        converged};
}

double orthogonal_worst_case_value(const UncertainEnsemble& ensemble) {
    const int m = ensemble.size();
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            const double overlap = std::abs(
                trace_inner(ensemble.states()[i].op(), ensemble.states()[j].op()));
            if (overlap > 1e-9)
                throw ValidationError(
                    "states are not mutually orthogonal: overlap " +
                    std::to_string(overlap));
        }

    const double pmax = ensemble.max_prior();
    double eta = 0.0;
    for (int i = 0; i < m; ++i)
        eta += ensemble.priors()[i] * ensemble.bounds()[i];

    double p_unknown_total = 0.0, p_unknown_max = 0.0;
    for (int i = 0; i < m; ++i)
        if (ensemble.bounds()[i] == 0.0) {
            p_unknown_total += ensemble.priors()[i];
            p_unknown_max = std::max(p_unknown_max, ensemble.priors()[i]);
        }
    return std::max(pmax, eta * (1.0 - p_unknown_total + p_unknown_max));
}

double uniform_threshold(const UncertainEnsemble& ensemble, double tol) {
    DesignSolution nominal = solve_nominal(
        DetectionProblem(ensemble.states(), ensemble.priors()), tol);
    if (!nominal.converged)
        throw ConvergenceError("nominal solve did not converge");
    return ensemble.max_prior() / nominal.value;
}

}  // namespace qdetect
