#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdetect/ensemble_io.hpp"
#include "qdetect/random_states.hpp"

namespace {

using namespace qdetect;

void print_matrix(const CMat& m, const char* indent) {
    for (int i = 0; i < m.dim(); ++i) {
        std::fputs(indent, stdout);
        for (int j = 0; j < m.dim(); ++j)
            std::printf(" (%.6g, %.6g)", m.at(i, j).real(), m.at(i, j).imag());
        std::fputc('\n', stdout);
    }
}

void print_certificate(const CertificateReport& rep, bool worst) {
    std::printf("certificate (tol %.3g): %s\n", rep.tol,
                rep.pass ? "PASS" : "FAIL");
    for (std::size_t i = 0; i < rep.state_margins.size(); ++i) {
        std::printf("  outcome %zu: state margin %+.3e, slack residual %.3e",
                    i, rep.state_margins[i], rep.slack_residuals[i]);
        if (worst)
            std::printf(
                ", povm margin %+.3e, bound %+.3e, trace margin %+.3e, "
                "scalar residual %.3e",
                rep.povm_margins[i], rep.bound_margins[i], rep.trace_margins[i],
                rep.scalar_residuals[i]);
        std::fputc('\n', stdout);
    }
}

int run_design(const std::string& input, Criterion criterion, double tol,
               const std::string& out) {
    const UncertainEnsemble ens = load_ensemble(input);
    const double cert_tol = 1e-6;

    SolutionFile sf;
    sf.criterion = criterion;
    sf.dim = ens.dim();
    CertificateReport report;
    bool converged = false;

    if (criterion == Criterion::WORST) {
        RobustDesign rb = design_worst_case(ens, tol);
        const WorstCaseSolution& ws = rb.program_solution;
        std::printf("criterion: worst\n");
        std::printf("value: %.12g\n", ws.value);
        std::printf("regime: %s (threshold margin %+.6g)\n",
                    rb.regime == Regime::EFFECTIVE ? "effective" : "guess",
                    rb.threshold_margin);
        std::printf("iterations: %d\nconverged: %s\ngap: %.3e\n",
                    ws.iterations, rb.converged ? "yes" : "no", ws.gap);
        for (int i = 0; i < ws.povm.size(); ++i) {
            std::printf("operator %d (lambda %.6g):\n", i, ws.bounds[i]);
            print_matrix(ws.povm[i].mat(), "   ");
        }
        report = verify_worst_case_certificate(ens, ws, cert_tol);
        print_certificate(report, true);
        sf.value = ws.value;
        sf.gap = ws.gap;
        sf.iterations = ws.iterations;
        sf.converged = ws.converged;
        sf.povm = ws.povm.operators();
        sf.dual = ws.dual;
        sf.bounds = ws.bounds;
        sf.regime = rb.regime;
        converged = rb.converged;
    } else {
        DetectionProblem prob =
            criterion == Criterion::AVERAGE
                ? effective_states(ens).problem()
                : DetectionProblem(ens.states(), ens.priors());
        DesignSolution sol = solve_nominal(prob, tol);
        std::printf("criterion: %s\n", criterion_name(criterion));
        std::printf("value: %.12g\n", sol.value);
        std::printf("iterations: %d\nconverged: %s\ngap: %.3e\n",
                    sol.iterations, sol.converged ? "yes" : "no", sol.gap);
        for (int i = 0; i < sol.povm.size(); ++i) {
            std::printf("operator %d:\n", i);
            print_matrix(sol.povm[i].mat(), "   ");
        }
        report = verify_nominal_certificate(prob, sol, cert_tol);
        print_certificate(report, false);
        sf.value = sol.value;
        sf.gap = sol.gap;
        sf.iterations = sol.iterations;
        sf.converged = sol.converged;
        sf.povm = sol.povm.operators();
        sf.dual = sol.dual;
        converged = sol.converged;
    }

    if (!out.empty()) save_solution(sf, out);
    if (!converged) {
        std::fprintf(stderr, "solver did not converge; best iterate shown\n");
        return 3;
    }
    return report.pass ? 0 : 1;
}

int run_sweep(const std::string& input, double q_from, double q_to, double step,
              double tol, const std::string& out) {
    const UncertainEnsemble tmpl = load_ensemble(input);
    const std::vector<SweepRecord> records =
        q_sweep(tmpl, q_from, q_to, step, standard_realizations(), tol);
    const std::string csv = sweep_to_csv(records);
    if (out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        write_text_file(out, csv);
    }
    int failed = 0;
    for (const auto& r : records)
        if (!r.ok) ++failed;
    if (failed > 0)
        std::fprintf(stderr, "%d of %zu rows failed; see status column\n",
                     failed, records.size());
    return 0;
}

int run_verify(const std::string& input, const std::string& solution_path,
               double tol) {
    const UncertainEnsemble ens = load_ensemble(input);
    const SolutionFile sf = load_solution(solution_path);
    if (sf.dim != ens.dim() || static_cast<int>(sf.povm.size()) != ens.size())
        throw DimensionError("solution shape does not match the ensemble");

    CertificateReport report;
    try {
        Povm povm(sf.povm);
        if (sf.criterion == Criterion::WORST) {
            WorstCaseSolution ws{std::move(povm), sf.bounds,      sf.value,
                                 *sf.dual,        {},             {},
                                 sf.gap,          sf.iterations,  sf.converged};
            report = verify_worst_case_certificate(ens, ws, tol);
            print_certificate(report, true);
        } else {
            DetectionProblem prob =
                sf.criterion == Criterion::AVERAGE
                    ? effective_states(ens).problem()
                    : DetectionProblem(ens.states(), ens.priors());
            DesignSolution ds{std::move(povm), sf.value,      *sf.dual,
                              sf.gap,          sf.iterations, sf.converged};
            report = verify_nominal_certificate(prob, ds, tol);
            print_certificate(report, false);
        }
    } catch (const ValidationError& e) {
        std::printf("FAIL: measurement invalid: %s\n", e.what());
        return 1;
    }
    std::printf("%s\n", report.pass ? "PASS" : "FAIL");
    return report.pass ? 0 : 1;
}

int run_mc(const std::string& input, int samples, std::uint64_t seed,
           double tol) {
    const UncertainEnsemble ens = load_ensemble(input);
    if (samples < 100) throw ValidationError("need at least 100 samples");

    DesignSolution avg = design_average(ens, tol);
    if (!avg.converged) {
        std::fprintf(stderr, "average design did not converge\n");
        return 3;
    }
    const double analytic = evaluate(avg.povm, ens, Realization::maximally_mixed());

    const int n = ens.dim();
    const int m = ens.size();
    RandomStateSampler parent(n, seed);
    std::vector<RandomStateSampler> subs;
    subs.reserve(m);
    for (int i = 0; i < m; ++i) subs.push_back(parent.derive(i));

    double mean = 0.0, m2 = 0.0;
    for (int k = 1; k <= samples; ++k) {
        std::vector<DensityOperator> realized;
        realized.reserve(m);
        for (int i = 0; i < m; ++i) {
            if (ens.bounds()[i] == 1.0) {
                // fully known: the realization never enters the value
                realized.push_back(ens.states()[i]);
                continue;
            }
            const std::vector<double> spec = subs[i].simplex_probabilities(n);
            CMat g(n);
            for (int r = 0; r < n; ++r) g.at(r, r) = spec[r];
            realized.push_back(
                subs[i].sample_product_mixed(DensityOperator(HermitianOperator(g))));
        }
        const double val =
            evaluate(avg.povm, ens, Realization::explicit_states(std::move(realized)));
        const double d1 = val - mean;
        mean += d1 / k;
        m2 += d1 * (val - mean);
    }
    const double se =
        std::sqrt(std::max(0.0, m2) / (static_cast<double>(samples - 1) * samples));

    std::printf("average design value: %.12g\n", avg.value);
    std::printf("analytic maximally mixed value: %.12g\n", analytic);
    std::printf("mc mean: %.12g +- %.3e (%d samples, seed %llu)\n", mean, se,
                samples, static_cast<unsigned long long>(seed));
    const double delta = std::abs(mean - analytic);
    if (delta > 3.0 * se)
        std::printf("WARNING: mc mean deviates from analytic value by %.3e "
                    "(3 se = %.3e)\n",
                    delta, 3.0 * se);
    else
        std::printf("mc mean within 3 se of the analytic value\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum-error measurement design for partially known "
                 "quantum ensembles"};
    app.require_subcommand(1);

    std::string input, out, solution_path, criterion_name_arg = "nominal";
    double tol = 1e-8, verify_tol = 1e-6;
    double q_from = 0.0, q_to = 1.0, step = 0.005;
    int samples = 100000;
    std::uint64_t seed = 1;

    CLI::App* design = app.add_subcommand("design", "Design a measurement");
    design->add_option("input", input, "Ensemble file")->required();
    design->add_option("--criterion", criterion_name_arg,
                       "nominal, worst or average");
    design->add_option("--tol", tol, "Solver tolerance");
    design->add_option("--out", out, "Write the solution file here");

    CLI::App* sweep = app.add_subcommand("sweep", "Sweep uniform q");
    sweep->add_option("input", input, "Ensemble file")->required();
    sweep->add_option("--q-from", q_from, "Sweep start");
    sweep->add_option("--q-to", q_to, "Sweep end");
    sweep->add_option("--step", step, "Grid step");
    sweep->add_option("--tol", tol, "Solver tolerance");
    sweep->add_option("--out", out, "Write CSV here instead of stdout");

    CLI::App* verify = app.add_subcommand("verify", "Check a solution file");
    verify->add_option("input", input, "Ensemble file")->required();
    verify->add_option("solution", solution_path, "Solution file")->required();
    verify->add_option("--tol", verify_tol, "Certificate tolerance");

    CLI::App* mc = app.add_subcommand("mc", "Monte Carlo check of the average design");
    mc->add_option("input", input, "Ensemble file")->required();
    mc->add_option("--samples", samples, "Sample count (at least 100)");
    mc->add_option("--seed", seed, "RNG seed");
    mc->add_option("--tol", tol, "Solver tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(design))
            return run_design(input, criterion_from_name(criterion_name_arg),
                              tol, out);
        if (app.got_subcommand(sweep))
            return run_sweep(input, q_from, q_to, step, tol, out);
        if (app.got_subcommand(verify))
            return run_verify(input, solution_path, verify_tol);
        if (app.got_subcommand(mc)) return run_mc(input, samples, seed, tol);
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
