#include "qdetect/scenario.hpp"

#include <algorithm>
#include <optional>
#include <thread>

namespace qdetect {
namespace {

double realized_term(const HermitianOperator& op, int dim,
                     const Realization& realization, int state_index) {
    switch (realization.kind()) {
        case RealizationKind::ADVERSARIAL:
            return eigen_hermitian(op.mat()).values.front();
        case RealizationKind::BEST:
            return eigen_hermitian(op.mat()).values.back();
        case RealizationKind::MAXIMALLY_MIXED:
            return op.trace() / dim;
        case RealizationKind::EXPLICIT:
            return trace_inner(op, realization.states()[state_index].op());
        case RealizationKind::NOMINAL:
            break;
    }
    return 0.0;
}

void fill_values(RealizedValues& out, const Povm& povm,
                 const UncertainEnsemble& ens,
                 const std::vector<RealizationKind>& kinds) {
    for (RealizationKind k : kinds) {
        switch (k) {
            case RealizationKind::NOMINAL:
                out.nominal = evaluate(povm, ens, Realization::nominal());
                break;
            case RealizationKind::ADVERSARIAL:
                out.adversarial = evaluate(povm, ens, Realization::adversarial());
                break;
            case RealizationKind::BEST:
                out.best = evaluate(povm, ens, Realization::best());
                break;
            case RealizationKind::MAXIMALLY_MIXED:
                out.maximally_mixed =
                    evaluate(povm, ens, Realization::maximally_mixed());
                break;
            case RealizationKind::EXPLICIT:
                break;
        }
    }
}

}  // namespace

Realization Realization::explicit_states(std::vector<DensityOperator> states) {
    if (states.empty())
        throw ValidationError("explicit realization needs at least one state");
    for (const auto& s : states)
        if (s.dim() != states.front().dim())
            throw DimensionError("explicit states have mixed dimensions");
    Realization r(RealizationKind::EXPLICIT);
    r.states_ = std::move(states);
    return r;
}

double evaluate(const Povm& povm, const UncertainEnsemble& ensemble,
                const Realization& realization) {
    if (povm.dim() != ensemble.dim())
        throw DimensionError("measurement dimension does not match ensemble");
    if (povm.size() != ensemble.size())
        throw DimensionError("measurement outcome count does not match ensemble");
    if (realization.kind() == RealizationKind::EXPLICIT) {
        if (static_cast<int>(realization.states().size()) != ensemble.size())
            throw ValidationError("explicit realization state count mismatch");
        if (realization.states().front().dim() != ensemble.dim())
            throw DimensionError("explicit realization dimension mismatch");
    }

    double total = 0.0;
    for (int i = 0; i < ensemble.size(); ++i) {
        const double q = ensemble.bounds()[i];
        const double known = trace_inner(povm[i], ensemble.states()[i].op());
        double unknown = known;
        if (realization.kind() != RealizationKind::NOMINAL && q < 1.0)
            unknown = realized_term(povm[i], ensemble.dim(), realization, i);
        total += ensemble.priors()[i] * (q * known + (1.0 - q) * unknown);
    }
    return total;
}

std::vector<SweepRecord> q_sweep(
    const UncertainEnsemble& ensemble_template, double q_from, double q_to,
    double step, const std::vector<RealizationKind>& realizations, double tol) {
    if (!(q_from >= 0.0) || !(q_to <= 1.0) || !(q_from <= q_to))
        throw ValidationError("q range must satisfy 0 <= q_from <= q_to <= 1");
    if (!(step > 0.0)) throw ValidationError("step must be positive");
    for (RealizationKind k : realizations)
        if (k == RealizationKind::EXPLICIT)
            throw ValidationError(
                "explicit realizations carry states and cannot be swept");

    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double q = q_from + k * step;
        if (q > q_to + 1e-12) break;
        grid.push_back(std::min(q, 1.0));
    }
    if (grid.empty()) grid.push_back(q_from);

    const int rows = static_cast<int>(grid.size());
    std::vector<SweepRecord> records(rows);
    std::vector<std::optional<Povm>> wc_povms(rows), avg_povms(rows);

    const DesignSolution nom = solve_nominal(
        DetectionProblem(ensemble_template.states(), ensemble_template.priors()),
        tol);
    if (!nom.converged) {
        for (int r = 0; r < rows; ++r) {
            records[r].q = grid[r];
            records[r].status = "nominal design did not converge";
        }
        return records;
    }

    auto run_row = [&](int r) {
        SweepRecord& rec = records[r];
        rec.q = grid[r];
        try {
            UncertainEnsemble ens(ensemble_template.states(),
                                  ensemble_template.priors(),
                                  std::vector<double>(ensemble_template.size(),
                                                      grid[r]));
            RobustDesign wc = design_worst_case(ens, tol);
            DesignSolution avg = design_average(ens, tol);
            if (!wc.converged)
                throw ConvergenceError("worst-case design did not converge");
            if (!avg.converged)
                throw ConvergenceError("average design did not converge");
            fill_values(rec.nom, nom.povm, ens, realizations);
            fill_values(rec.wc, wc.chosen_povm, ens, realizations);
            fill_values(rec.avg, avg.povm, ens, realizations);
            rec.nom_value = nom.value;
            rec.wc_value = wc.worst_case_value;
            rec.avg_value = avg.value;
            rec.wc_regime = wc.regime;
            rec.dist_wc_nom = frobenius_distance(wc.chosen_povm, nom.povm);
            rec.dist_avg_nom = frobenius_distance(avg.povm, nom.povm);
            wc_povms[r] = std::move(wc.chosen_povm);
            avg_povms[r] = std::move(avg.povm);
            rec.ok = true;
        } catch (const std::exception& e) {
            rec.ok = false;
            rec.status = e.what();
        }
    };

    const unsigned hw = std::thread::hardware_concurrency();
    const int nthreads = std::max(1, std::min(hw == 0 ? 1 : static_cast<int>(hw),
                                              rows));
    if (nthreads == 1) {
        for (int r = 0; r < rows; ++r) run_row(r);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int t = 0; t < nthreads; ++t)
            pool.emplace_back([&run_row, t, rows, nthreads] {
                for (int r = t; r < rows; r += nthreads) run_row(r);
            });
        for (auto& th : pool) th.join();
    }

    for (int r = 1; r < rows; ++r) {
        if (wc_povms[r] && wc_povms[r - 1])
            records[r].diff_wc = frobenius_distance(*wc_povms[r], *wc_povms[r - 1]);
        if (avg_povms[r] && avg_povms[r - 1])
            records[r].diff_avg =
                frobenius_distance(*avg_povms[r], *avg_povms[r - 1]);
    }
    return records;
}

double measurement_difference(const Povm& a, const Povm& b) {
    if (a.size() != b.size() || a.dim() != b.dim())
        throw DimensionError("measurements have different shapes");
    return frobenius_distance(a, b);
}

}  // namespace qdetect
