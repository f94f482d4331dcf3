#include "qdetect/average.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qdetect {

AverageProblem effective_states(const UncertainEnsemble& ensemble) {
    const int n = ensemble.dim();
    AverageProblem out;
    out.priors = ensemble.priors();
    out.states.reserve(ensemble.size());
    for (int i = 0; i < ensemble.size(); ++i) {
        const double q = ensemble.bounds()[i];
        if (q == 1.0) {
            out.states.push_back(ensemble.states()[i]);
            continue;
        }
        CMat m = ensemble.states()[i].mat();
        m *= q;
        const double mix = (1.0 - q) / n;
        for (int r = 0; r < n; ++r) m.at(r, r) += mix;
        out.states.emplace_back(HermitianOperator(m));
    }
    return out;
}

DesignSolution design_average(const UncertainEnsemble& ensemble, double tol) {
    return solve_nominal(effective_states(ensemble).problem(), tol);
}

MeasurementWeights measurement_weights(const Povm& povm,
                                       const UncertainEnsemble& ensemble) {
    if (povm.dim() != ensemble.dim())
        throw DimensionError("povm dimension " + std::to_string(povm.dim()) +
                             " does not match ensemble dimension " +
                             std::to_string(ensemble.dim()));
    MeasurementWeights out;
    const int m = povm.size();
    out.sigma.reserve(m);
    out.shapes.reserve(m);
    out.outcome_probabilities.reserve(m);
    for (int i = 0; i < m; ++i) {
        const double s = povm[i].trace();
        out.sigma.push_back(s);
        if (s > 0.0) {
            CMat shape = povm[i].mat();
            shape *= 1.0 / s;
            out.shapes.emplace_back(HermitianOperator(shape));
        } else {
            out.shapes.emplace_back(std::nullopt);
        }
        double p = 0.0;
        for (int j = 0; j < ensemble.size(); ++j)
            p += ensemble.priors()[j] *
                 trace_inner(povm[i], ensemble.states()[j].op());
        out.outcome_probabilities.push_back(p);
    }
    return out;
}

EquiprobableShortcut equiprobable_shortcut(const UncertainEnsemble& ensemble,
                                           double tol) {
    const int m = ensemble.size();
    const double uniform = 1.0 / m;
    for (double p : ensemble.priors())
        if (std::abs(p - uniform) > 1e-12) return {};
    double qmin = ensemble.bounds()[0], qmax = qmin;
    for (double q : ensemble.bounds()) {
        qmin = std::min(qmin, q);
        qmax = std::max(qmax, q);
    }
    if (qmax - qmin > 1e-12 || qmin <= 0.0) return {};
    DesignSolution nominal = solve_nominal(
        DetectionProblem(ensemble.states(), ensemble.priors()), tol);
    return {true, std::move(nominal.povm)};
}

}  // namespace qdetect
