#pragma once

#include <vector>

#include "qdetect/cmatrix.hpp"

namespace qdetect {

// Hermitian matrix, validated on construction and stored exactly
// symmetrized. Carrier for states, measurement operators and duals.
class HermitianOperator {
public:
    explicit HermitianOperator(const CMat& m, double atol = 1e-12);

    static HermitianOperator identity(int n);
    static HermitianOperator zero(int n);

    int dim() const { return m_.dim(); }
    const CMat& mat() const { return m_; }
    double trace() const;

private:
    struct Trusted {};
    HermitianOperator(CMat m, Trusted) : m_(std::move(m)) {}
    CMat m_;
};

// PSD within 1e-10 and unit trace within 1e-10.
class DensityOperator {
public:
    explicit DensityOperator(HermitianOperator op);

    static DensityOperator maximally_mixed(int n);
    // |psi><psi| for the given amplitudes, normalized first
    static DensityOperator pure(const std::vector<cdouble>& amplitudes);

    int dim() const { return op_.dim(); }
    const HermitianOperator& op() const { return op_; }
    const CMat& mat() const { return op_.mat(); }

private:
    HermitianOperator op_;
};

// Measurement: PSD operators (within psd_tol) resolving the identity
// (Frobenius deviation within sum_tol).
class Povm {
public:
    Povm(std::vector<HermitianOperator> operators, double psd_tol = 1e-9,
         double sum_tol = 1e-8);

    int dim() const { return operators_.front().dim(); }
    int size() const { return static_cast<int>(operators_.size()); }
    const HermitianOperator& operator[](int i) const { return operators_[i]; }
    const std::vector<HermitianOperator>& operators() const { return operators_; }

private:
    std::vector<HermitianOperator> operators_;
};

// Known parts rho_i^0 with priors p_i and certainty weights q_i in [0,1]:
// each received state is q_i * rho_i^0 + (1-q_i) * (arbitrary rho_i^1).
// The known states must jointly span the space.
class UncertainEnsemble {
public:
    UncertainEnsemble(std::vector<DensityOperator> states,
                      std::vector<double> priors, std::vector<double> bounds);

    int dim() const { return states_.front().dim(); }
    int size() const { return static_cast<int>(states_.size()); }
    const std::vector<DensityOperator>& states() const { return states_; }
    const std::vector<double>& priors() const { return priors_; }
    const std::vector<double>& bounds() const { return bounds_; }
    double max_prior() const;

private:
    std::vector<DensityOperator> states_;
    std::vector<double> priors_;
    std::vector<double> bounds_;
};

double min_eigenvalue(const HermitianOperator& op);

// Smallest eigenvalue together with an orthonormal basis of its eigenspace
// (all eigenvectors whose eigenvalue lies within `cluster` of the minimum).
struct EigenspaceBasis {
    double value;
    std::vector<std::vector<cdouble>> vectors;
};
EigenspaceBasis min_eigenspace(const HermitianOperator& op,
                               double cluster = 1e-9);

bool is_psd(const HermitianOperator& op, double tol);

// sqrt(sum_i ||A_i - B_i||_F^2), the column-concatenated Frobenius distance
double frobenius_distance(const std::vector<HermitianOperator>& a,
                          const std::vector<HermitianOperator>& b);
double frobenius_distance(const Povm& a, const Povm& b);

// Tr(AB), real for Hermitian inputs
double trace_inner(const HermitianOperator& a, const HermitianOperator& b);

}  // namespace qdetect
