#pragma once

#include <limits>
#include <string>
#include <vector>

#include "qdetect/average.hpp"
#include "qdetect/robust.hpp"

namespace qdetect {

enum class RealizationKind {
    ADVERSARIAL,
    BEST,
    NOMINAL,
    MAXIMALLY_MIXED,
    EXPLICIT
};

// A concrete resolution of the unknown components rho_i^1. The worst and
// best cases depend on the measurement under evaluation, so they are
// resolved inside evaluate() and never cached across measurements.
class Realization {
public:
    static Realization adversarial() { return Realization(RealizationKind::ADVERSARIAL); }
    static Realization best() { return Realization(RealizationKind::BEST); }
    static Realization nominal() { return Realization(RealizationKind::NOMINAL); }
    static Realization maximally_mixed() { return Realization(RealizationKind::MAXIMALLY_MIXED); }
    static Realization explicit_states(std::vector<DensityOperator> states);

    RealizationKind kind() const { return kind_; }
    const std::vector<DensityOperator>& states() const { return states_; }

private:
    explicit Realization(RealizationKind kind) : kind_(kind) {}
    RealizationKind kind_;
    std::vector<DensityOperator> states_;
};

// sum_i p_i [ q_i Tr(Pi_i rho_i^0) + (1 - q_i) Tr(Pi_i rho_i^1) ] with
// rho_i^1 resolved per the realization.
double evaluate(const Povm& povm, const UncertainEnsemble& ensemble,
                const Realization& realization);

// Detection values of one designed measurement under the four standard
// realizations. NaN marks a realization that was not requested.
struct RealizedValues {
    double nominal = std::numeric_limits<double>::quiet_NaN();
    double adversarial = std::numeric_limits<double>::quiet_NaN();
    double best = std::numeric_limits<double>::quiet_NaN();
    double maximally_mixed = std::numeric_limits<double>::quiet_NaN();
};

struct SweepRecord {
    double q = std::numeric_limits<double>::quiet_NaN();
    bool ok = false;
    std::string status;

    RealizedValues nom, wc, avg;
    double nom_value = std::numeric_limits<double>::quiet_NaN();
    double wc_value = std::numeric_limits<double>::quiet_NaN();
    double avg_value = std::numeric_limits<double>::quiet_NaN();
    Regime wc_regime = Regime::GUESS;

    double dist_wc_nom = std::numeric_limits<double>::quiet_NaN();
    double dist_avg_nom = std::numeric_limits<double>::quiet_NaN();
    double diff_wc = std::numeric_limits<double>::quiet_NaN();
    double diff_avg = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<RealizationKind> standard_realizations() {
    return {RealizationKind::NOMINAL, RealizationKind::ADVERSARIAL,
            RealizationKind::BEST, RealizationKind::MAXIMALLY_MIXED};
}

// Uniform-q sweep over [q_from, q_to] in steps of `step`. The template's own
// q values are ignored; each row designs the nominal, worst case and average
// measurements at that row's q and evaluates the requested realizations.
// A row whose solve fails carries ok = false and a status message; the sweep
// continues. Rows are computed in parallel and returned ordered by q.
std::vector<SweepRecord> q_sweep(
    const UncertainEnsemble& ensemble_template, double q_from, double q_to,
    double step,
    const std::vector<RealizationKind>& realizations = standard_realizations(),
    double tol = 1e-8);

// Frobenius distance between two equally shaped measurements, the
// consecutive-q difference of a sweep.
double measurement_difference(const Povm& a, const Povm& b);

}  // namespace qdetect
