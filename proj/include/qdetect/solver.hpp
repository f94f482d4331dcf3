#pragma once

#include <vector>

#include "qdetect/hermitian.hpp"

namespace qdetect {

// Discrimination instance: which of the given states (with the given prior)
// was sent. Zero priors are permitted here; they arise as effective priors
// of fully uncertain states.
class DetectionProblem {
public:
    DetectionProblem(std::vector<DensityOperator> states,
                     std::vector<double> priors);

    int dim() const { return states_.front().dim(); }
    int size() const { return static_cast<int>(states_.size()); }
    const std::vector<DensityOperator>& states() const { return states_; }
    const std::vector<double>& priors() const { return priors_; }
    double max_prior() const;

private:
    std::vector<DensityOperator> states_;
    std::vector<double> priors_;
};

struct DesignSolution {
    Povm povm;
    double value;             // sum_i p_i Tr(Pi_i rho_i)
    HermitianOperator dual;   // U with U >= p_i rho_i at optimum
    double gap;               // Tr(U) - value
    int iterations;
    bool converged;
};

struct WorstCaseSolution {
    Povm povm;
    std::vector<double> bounds;                        // lambda_i
    double value;                                      // worst-case P_d
    HermitianOperator dual;                            // U
    std::vector<HermitianOperator> state_multipliers;  // Z_i = U - p_i q_i rho_i^0
    std::vector<double> trace_multipliers;             // w_i = Tr(U) - p_i
    double gap;
    int iterations;
    bool converged;
};

// Optimality-condition audit. The first two vectors apply to both program
// kinds; the remaining ones are filled for worst-case certificates only.
struct CertificateReport {
    std::vector<double> state_margins;     // min eigenvalue of U - c_i rho_i
    std::vector<double> slack_residuals;   // ||(U - c_i rho_i)(Pi_i - lambda_i I)||_F
    std::vector<double> povm_margins;      // min eigenvalue of Pi_i - lambda_i I
    std::vector<double> bound_margins;     // lambda_i
    std::vector<double> trace_margins;     // Tr(U) - p_i
    std::vector<double> scalar_residuals;  // |(Tr(U) - p_i) lambda_i|
    double tol = 0.0;
    bool pass = false;
};

// Maximize sum_i p_i Tr(Pi_i rho_i) over POVMs. Interior-point solve of the
// primal/dual pair; the returned dual U certifies optimality via
// U >= p_i rho_i and (U - p_i rho_i) Pi_i = 0.
DesignSolution solve_nominal(const DetectionProblem& problem, double tol = 1e-8);

// Maximize the worst-case detection probability
// sum_i p_i [q_i Tr(Pi_i rho_i^0) + (1 - q_i) lambda_i] subject to
// Pi_i >= lambda_i I >= 0. Dual: minimize Tr(U) subject to
// U >= p_i q_i rho_i^0 and Tr(U) >= p_i.
WorstCaseSolution solve_worst_case_program(const UncertainEnsemble& ensemble,
                                           double tol = 1e-8);

CertificateReport verify_nominal_certificate(const DetectionProblem& problem,
                                             const DesignSolution& solution,
                                             double tol);

CertificateReport verify_worst_case_certificate(
    const UncertainEnsemble& ensemble, const WorstCaseSolution& solution,
    double tol);

// Closed-form optimum for two states: (1 + tracenorm(p_a rho_a - p_b rho_b)) / 2.
double two_state_oracle(const DensityOperator& rho_a, const DensityOperator& rho_b,
                        double p_a, double p_b);

// Grid search over projective qubit measurements plus the two guess
// assignments; valid lower bound, exact for m = n = 2 as the grid refines.
double brute_force_oracle(const DetectionProblem& problem, int grid_density);

}  // namespace qdetect
