#include "qdetect/hermitian.hpp"

#include <cmath>
#include <utility>

#include "qdetect/kernels.hpp"

namespace qdetect {

HermitianOperator::HermitianOperator(const CMat& m, double atol) : m_() {
    if (m.dim() <= 0) throw ValidationError("operator dimension must be positive");
    double worst = 0.0;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = i; j < m.dim(); ++j)
            worst = std::max(worst, std::abs(m.at(i, j) - std::conj(m.at(j, i))));
    if (worst > atol)
        throw ValidationError("matrix is not Hermitian: largest deviation " +
                              std::to_string(worst));
    m_ = hermitize(m);
}

HermitianOperator HermitianOperator::identity(int n) {
    return HermitianOperator(CMat::identity(n), Trusted{});
}

HermitianOperator HermitianOperator::zero(int n) {
    if (n <= 0) throw ValidationError("operator dimension must be positive");
    return HermitianOperator(CMat(n), Trusted{});
}

double HermitianOperator::trace() const { return qdetect::trace(m_).real(); }

DensityOperator::DensityOperator(HermitianOperator op) : op_(std::move(op)) {
    const double mineig = min_eigenvalue(op_);
    if (mineig < -1e-10)
        throw ValidationError("density operator has eigenvalue " +
                              std::to_string(mineig));
    const double tr = op_.trace();
    if (std::abs(tr - 1.0) > 1e-10)
        throw ValidationError("density operator has trace " + std::to_string(tr));
}

DensityOperator DensityOperator::maximally_mixed(int n) {
    CMat m = CMat::identity(n);
    m *= 1.0 / n;
    return DensityOperator(HermitianOperator(m));
}

DensityOperator DensityOperator::pure(const std::vector<cdouble>& amplitudes) {
    const int n = static_cast<int>(amplitudes.size());
    if (n == 0) throw ValidationError("empty state vector");
    const double nrm =
        std::sqrt(kernels::active().norm_sq(amplitudes.size(), amplitudes.data()));
    if (nrm == 0.0) throw ValidationError("zero state vector");
    CMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m.at(i, j) = amplitudes[i] * std::conj(amplitudes[j]) / (nrm * nrm);
    return DensityOperator(HermitianOperator(m));
}

Povm::Povm(std::vector<HermitianOperator> operators, double psd_tol,
           double sum_tol)
    : operators_(std::move(operators)) {
    if (operators_.empty()) throw ValidationError("POVM needs at least one operator");
    const int n = operators_.front().dim();
    CMat sum(n);
    for (const auto& op : operators_) {
        if (op.dim() != n)
            throw DimensionError("POVM operators have mixed dimensions");
        if (!is_psd(op, psd_tol))
            throw ValidationError("POVM operator is not PSD within tolerance");
        sum += op.mat();
    }
    const double dev = frob_dist(sum, CMat::identity(n));
    if (dev > sum_tol)
        throw ValidationError("POVM does not resolve the identity: deviation " +
                              std::to_string(dev));
}

UncertainEnsemble::UncertainEnsemble(std::vector<DensityOperator> states,
                                     std::vector<double> priors,
                                     std::vector<double> bounds)
    : states_(std::move(states)),
      priors_(std::move(priors)),
      bounds_(std::move(bounds)) {
    if (states_.empty()) throw ValidationError("ensemble needs at least one state");
    if (priors_.size() != states_.size() || bounds_.size() != states_.size())
        throw DimensionError("states, priors and bounds must have equal length");
    const int n = states_.front().dim();
    double total = 0.0;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (states_[i].dim() != n)
            throw DimensionError("ensemble states have mixed dimensions");
        if (priors_[i] <= 0.0)
            throw ValidationError("priors must be strictly positive");
        if (bounds_[i] < 0.0 || bounds_[i] > 1.0)
            throw ValidationError("q values must lie in [0, 1]");
        total += priors_[i];
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw ValidationError("priors sum to " + std::to_string(total));

    CMat span(n);
    for (const auto& s : states_) span += s.mat();
    const EigenSystem es = eigen_hermitian(span);
    int rank = 0;
    for (double v : es.values)
        if (v > 1e-9) ++rank;
    if (rank != n)
        throw ValidationError(
            "known states span only a " + std::to_string(rank) +
            "-dimensional subspace of the " + std::to_string(n) +
            "-dimensional space");
}

double UncertainEnsemble::max_prior() const {
    double m = 0.0;
    for (double p : priors_) m = std::max(m, p);
    return m;
}

double min_eigenvalue(const HermitianOperator& op) {
    return eigen_hermitian(op.mat()).values.front();
}

EigenspaceBasis min_eigenspace(const HermitianOperator& op, double cluster) {
    const EigenSystem es = eigen_hermitian(op.mat());
    EigenspaceBasis out;
    out.value = es.values.front();
    const int n = op.dim();
    for (int k = 0; k < n; ++k) {
        if (es.values[k] > out.value + cluster) break;
        std::vector<cdouble> col(n);
        for (int r = 0; r < n; ++r) col[r] = es.vectors.at(r, k);
        out.vectors.push_back(std::move(col));
    }
    return out;
}

bool is_psd(const HermitianOperator& op, double tol) {
    return min_eigenvalue(op) >= -tol;
}

double frobenius_distance(const std::vector<HermitianOperator>& a,
                          const std::vector<HermitianOperator>& b) {
    if (a.size() != b.size())
        throw DimensionError("operator lists have different lengths");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].dim() != b[i].dim())
            throw DimensionError("operator lists have mixed dimensions");
        s += kernels::active().diff_norm_sq(a[i].mat().size(), a[i].mat().data(),
                                            b[i].mat().data());
    }
    return std::sqrt(s);
}

double frobenius_distance(const Povm& a, const Povm& b) {
    return frobenius_distance(a.operators(), b.operators());
}

double trace_inner(const HermitianOperator& a, const HermitianOperator& b) {
    if (a.dim() != b.dim())
        throw DimensionError("trace inner product: dimension mismatch");
    // Tr(AB) = sum_jk conj(B[j][k]) A[j][k] for Hermitian B
    return frob_inner(b.mat(), a.mat()).real();
}

}  // namespace qdetect
