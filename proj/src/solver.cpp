#include "qdetect/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "qdetect/kernels.hpp"

namespace qdetect {

DetectionProblem::DetectionProblem(std::vector<DensityOperator> states,
                                   std::vector<double> priors)
    : states_(std::move(states)), priors_(std::move(priors)) {
    if (states_.empty()) throw ValidationError("problem needs at least one state");
    if (priors_.size() != states_.size())
        throw DimensionError("state and prior counts differ");
    const int n = states_.front().dim();
    double total = 0.0;
    for (std::size_t i = 0; i < states_.size(); ++i) {
        if (states_[i].dim() != n)
            throw DimensionError("problem states have mixed dimensions");
        if (priors_[i] < 0.0) throw ValidationError("priors must be nonnegative");
        total += priors_[i];
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw ValidationError("priors sum to " + std::to_string(total));
}

double DetectionProblem::max_prior() const {
    double m = 0.0;
    for (double p : priors_) m = std::max(m, p);
    return m;
}

namespace {

const double kSqrt2 = std::sqrt(2.0);

// ---- dense real symmetric systems (Schur complement solves) ----

struct RealMat {
    int d = 0;
    std::vector<double> a;
    explicit RealMat(int dim) : d(dim), a(static_cast<std::size_t>(dim) * dim) {}
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * d + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * d + j]; }
};

// In-place lower Cholesky; false when a pivot is lost.
bool cholesky_factor(RealMat& m) {
    const int d = m.d;
    for (int j = 0; j < d; ++j) {
        double diag = m.at(j, j);
        for (int k = 0; k < j; ++k) diag -= m.at(j, k) * m.at(j, k);
        if (!(diag > 0.0)) return false;
        const double ljj = std::sqrt(diag);
        m.at(j, j) = ljj;
        for (int i = j + 1; i < d; ++i) {
            double v = m.at(i, j);
            for (int k = 0; k < j; ++k) v -= m.at(i, k) * m.at(j, k);
            m.at(i, j) = v / ljj;
        }
    }
    return true;
}

void cholesky_solve(const RealMat& l, std::vector<double>& x) {
    const int d = l.d;
    for (int i = 0; i < d; ++i) {
        double v = x[i];
        for (int k = 0; k < i; ++k) v -= l.at(i, k) * x[k];
        x[i] = v / l.at(i, i);
    }
    for (int i = d - 1; i >= 0; --i) {
        double v = x[i];
        for (int k = i + 1; k < d; ++k) v -= l.at(k, i) * x[k];
        x[i] = v / l.at(i, i);
    }
}

// Solve with the (possibly jittered) factor, then refine against the exact
// matrix. Two rounds recover most of the accuracy lost to ill conditioning
// near the central path's end.
void refined_solve(const RealMat& factor, const RealMat& exact,
                   std::vector<double>& b) {
    const int d = exact.d;
    std::vector<double> y = b;
    cholesky_solve(factor, y);
    std::vector<double> r(d);
    for (int round = 0; round < 2; ++round) {
        for (int i = 0; i < d; ++i) {
            double acc = b[i];
            for (int j = 0; j < d; ++j) acc -= exact.at(i, j) * y[j];
            r[i] = acc;
        }
        cholesky_solve(factor, r);
        for (int i = 0; i < d; ++i) y[i] += r[i];
    }
    b = y;
}

// ---- orthonormal real coordinates for Hermitian matrices ----
// Order: n diagonal entries, then per pair j<k the sqrt(2)-scaled real and
// imaginary parts of the upper entry. The map is an isometry.

void herm_to_vec(const CMat& h, std::vector<double>& out) {
    const int n = h.dim();
    int idx = 0;
    for (int r = 0; r < n; ++r) out[idx++] = h.at(r, r).real();
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            out[idx++] = kSqrt2 * h.at(j, k).real();
            out[idx++] = kSqrt2 * h.at(j, k).imag();
        }
}

CMat vec_to_herm(int n, const std::vector<double>& y) {
    CMat h(n);
    int idx = 0;
    for (int r = 0; r < n; ++r) h.at(r, r) = y[idx++];
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            const double re = y[idx++] / kSqrt2;
            const double im = y[idx++] / kSqrt2;
            h.at(j, k) = {re, im};
            h.at(k, j) = {re, -im};
        }
    return h;
}

// ---- spectral helpers ----

CMat spectral_apply(const EigenSystem& es, double (*f)(double)) {
    std::vector<double> vals(es.values.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = f(es.values[i]);
    return eigen_assemble(es.vectors, vals);
}

double clamped_sqrt(double v) { return std::sqrt(std::max(v, 1e-300)); }
double clamped_inv_sqrt(double v) { return 1.0 / std::sqrt(std::max(v, 1e-300)); }
double clamped_inv(double v) { return 1.0 / std::max(v, 1e-300); }

// Largest alpha in (0, 1] keeping X + alpha * D PSD.
double step_to_boundary(const CMat& x, const CMat& d) {
    const EigenSystem es = eigen_hermitian(x);
    const CMat xih = spectral_apply(es, clamped_inv_sqrt);
    const CMat t = hermitize(xih * d * xih);
    const double lmin = eigen_hermitian(t).values.front();
    if (lmin >= 0.0) return 1.0;
    return std::min(1.0, -1.0 / lmin);
}

double scalar_step_to_boundary(double x, double d) {
    if (d >= 0.0) return 1.0;
    return std::min(1.0, -x / d);
}

// ---- the cone program ----
// maximize  sum_k <C_k, X_k> + sum_j c_j * lam_j
// s.t.      sum_k X_k + (sum_j lam_j) I = I,  X_k PSD,  lam_j >= 0
// dual:     minimize Tr(U)  s.t.  U - C_k PSD,  Tr(U) >= c_j

struct ConeProgram {
    int n = 0;
    std::vector<CMat> mat_cost;      // C_k
    std::vector<double> scalar_cost;  // c_j
};

struct ConeSolution {
    std::vector<CMat> x;
    std::vector<double> lam;
    CMat u;
    double primal_value = 0.0;
    double gap = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct Scaling {
    CMat w;      // NT point, W Z W = X
    CMat zinv;
    double w2 = 0.0;  // scalar blocks: lam / z
};

// Nesterov-Todd scaled predictor-corrector path following. Feasible start,
// so the equality residuals stay at rounding level; they are still carried
// through the Newton systems to mop up drift.
ConeSolution solve_cone(const ConeProgram& prog, double tol, int max_iter) {
    const int n = prog.n;
    const int nmat = static_cast<int>(prog.mat_cost.size());
    const int nsca = static_cast<int>(prog.scalar_cost.size());
    const int d = n * n;
    const double nu = static_cast<double>(nmat) * n + nsca;
    const CMat eye = CMat::identity(n);

    // strictly feasible primal start
    std::vector<CMat> x(nmat);
    std::vector<double> lam(nsca);
    {
        const double alpha = 1.0 / (nmat + nsca);
        for (int k = 0; k < nmat; ++k) {
            x[k] = eye;
            x[k] *= alpha;
        }
        for (int j = 0; j < nsca; ++j) lam[j] = alpha;
    }

    // strictly feasible dual start
    double tau = 1.0;
    for (const CMat& c : prog.mat_cost)
        tau = std::max(tau, 1.5 * eigen_hermitian(c).values.back() + 0.1);
    for (double c : prog.scalar_cost) tau = std::max(tau, (1.5 * c + 0.1) / n);
    CMat u = eye;
    u *= tau;
    std::vector<CMat> z(nmat);
    std::vector<double> zs(nsca);
    for (int k = 0; k < nmat; ++k) z[k] = hermitize(u - prog.mat_cost[k]);
    for (int j = 0; j < nsca; ++j) zs[j] = n * tau - prog.scalar_cost[j];

    ConeSolution best;
    double best_score = std::numeric_limits<double>::infinity();
    auto record = [&](int iter, bool converged) {
        double pval = 0.0;
        for (int k = 0; k < nmat; ++k)
            pval += frob_inner(prog.mat_cost[k], x[k]).real();
        for (int j = 0; j < nsca; ++j) pval += prog.scalar_cost[j] * lam[j];
        ConeSolution s;
        s.x = x;
        s.lam = lam;
        s.u = u;
        s.primal_value = pval;
        s.gap = trace(u).real() - pval;
        s.iterations = iter;
        s.converged = converged;
        return s;
    };

    // Once the requested tolerance is met the loop keeps going toward a much
    // smaller gap; complementarity cross terms shrink like sqrt(gap), so the
    // extra depth is what makes the returned iterate certifiable.
    ConeSolution user_sol;
    bool user_met = false;
    int user_iter = 0;
    double user_best = std::numeric_limits<double>::infinity();
    const double tol_deep = std::max(1e-12, 1e-4 * tol);
    // Deep iterations push kappa(Schur) toward 1/mu, and the solve error is
    // amplified back through the scaling; equality drift of a few parts in
    // 1e10 is inherent there and contributes rp * ||u|| to the realized gap,
    // so the gate only needs to keep that contribution below the tolerance.
    const double feas_tol = std::max(1e-11, 0.3 * tol);

    int stall = 0;
    double mu_prev = std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= max_iter; ++iter) {
        // residuals and complementarity
        CMat rp = eye;
        double lam_sum = 0.0;
        for (int j = 0; j < nsca; ++j) lam_sum += lam[j];
        for (int k = 0; k < nmat; ++k) rp -= x[k];
        for (int i = 0; i < n; ++i) rp.at(i, i) -= lam_sum;

        const double tru = trace(u).real();
        std::vector<CMat> rd(nmat);
        std::vector<double> rds(nsca);
        double rd_max = 0.0;
        for (int k = 0; k < nmat; ++k) {
            rd[k] = hermitize(u - prog.mat_cost[k] - z[k]);
            rd_max = std::max(rd_max, frob_norm(rd[k]));
        }
        for (int j = 0; j < nsca; ++j) {
            rds[j] = tru - prog.scalar_cost[j] - zs[j];
            rd_max = std::max(rd_max, std::abs(rds[j]));
        }
        const double rp_norm = frob_norm(rp);

        double compl_sum = 0.0;
        double slack_now = 0.0;
        for (int k = 0; k < nmat; ++k) {
            compl_sum += frob_inner(x[k], z[k]).real();
            slack_now = std::max(slack_now, frob_norm(x[k] * z[k]));
        }
        for (int j = 0; j < nsca; ++j) {
            compl_sum += lam[j] * zs[j];
            slack_now = std::max(slack_now, std::abs(lam[j] * zs[j]));
        }
        const double mu = compl_sum / nu;

        double pval = 0.0;
        for (int k = 0; k < nmat; ++k)
            pval += frob_inner(prog.mat_cost[k], x[k]).real();
        for (int j = 0; j < nsca; ++j) pval += prog.scalar_cost[j] * lam[j];
        const double gap_now = tru - pval;
        const double scale = std::max(1.0, std::abs(pval));

        const bool feasible = rp_norm <= feas_tol && rd_max <= feas_tol;
        if (feasible && compl_sum <= 0.9 * tol && gap_now <= 0.95 * tol) {
            // the product norm drives the certificate, so prefer the most
            // centered of the qualifying iterates, not just the deepest
            const double score = slack_now + std::max(compl_sum, std::abs(gap_now));
            if (score < user_best) {
                if (!user_met) user_iter = iter;
                user_best = score;
                user_sol = record(iter - 1, true);
                user_met = true;
                stall = 0;
            }
            if (user_best <= tol_deep) return user_sol;
        }
        if (compl_sum < 0.0) break;  // left the cone; current iterate is junk
        if (compl_sum <= 1e-15 * scale) {
            // rounding floor; cannot make further progress in doubles
            if (feasible && gap_now <= tol) return record(iter - 1, true);
            break;
        }
        {
            double score = std::max(compl_sum, std::abs(gap_now)) +
                           1e4 * (rp_norm + rd_max);
            if (score < best_score) {
                best_score = score;
                best = record(iter - 1, false);
            }
        }
        // once a returnable iterate exists, deep iterations must keep paying
        // their way; at the mu floor the value only jitters
        if (mu > (user_met ? 0.9 : 0.9999) * mu_prev) {
            if (++stall >= (user_met ? 6 : 20)) break;
        } else {
            stall = 0;
        }
        if (user_met && iter - user_iter >= 60) break;
        mu_prev = mu;

        // NT scalings
        std::vector<Scaling> sc(std::max(nmat, 1));
        for (int k = 0; k < nmat; ++k) {
            const EigenSystem ez = eigen_hermitian(z[k]);
            const CMat zh = spectral_apply(ez, clamped_sqrt);
            const CMat zih = spectral_apply(ez, clamped_inv_sqrt);
            const CMat m = hermitize(zh * x[k] * zh);
            const CMat mh = spectral_apply(eigen_hermitian(m), clamped_sqrt);
            sc[k].w = hermitize(zih * mh * zih);
            sc[k].zinv = spectral_apply(ez, clamped_inv);
        }
        std::vector<double> w2(nsca);
        double w2_sum = 0.0;
        for (int j = 0; j < nsca; ++j) {
            w2[j] = lam[j] / zs[j];
            w2_sum += w2[j];
        }

        // Schur matrix S[r][s] = <E_r, sum_k W_k E_s W_k> + scalar coupling
        RealMat schur(d);
        std::vector<std::pair<int, int>> pairs;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) pairs.emplace_back(p, q);
        std::vector<cdouble> colj(n), colk(n);
        std::vector<double> coeffs(d);
        CMat f(n);
        for (int k = 0; k < nmat; ++k) {
            const CMat& w = sc[k].w;
            for (int s = 0; s < d; ++s) {
                // basis element index s -> F = W E_s W via outer products
                if (s < n) {
                    for (int r = 0; r < n; ++r) colj[r] = w.at(r, s);
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b)
                            f.at(a, b) = colj[a] * std::conj(colj[b]);
                } else {
                    const auto [jj, kk] = pairs[(s - n) / 2];
                    const bool imag_part = ((s - n) & 1) != 0;
                    for (int r = 0; r < n; ++r) {
                        colj[r] = w.at(r, jj);
                        colk[r] = w.at(r, kk);
                    }
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) {
                            const cdouble t1 = colj[a] * std::conj(colk[b]);
                            const cdouble t2 = colk[a] * std::conj(colj[b]);
                            f.at(a, b) = imag_part
                                             ? cdouble(0, 1) * (t1 - t2) / kSqrt2
                                             : (t1 + t2) / kSqrt2;
                        }
                }
                herm_to_vec(f, coeffs);
                for (int r = 0; r < d; ++r) schur.at(r, s) += coeffs[r];
            }
        }
        // enforce exact symmetry before factoring
        for (int r = 0; r < d; ++r)
            for (int s = r + 1; s < d; ++s) {
                const double v = 0.5 * (schur.at(r, s) + schur.at(s, r));
                schur.at(r, s) = v;
                schur.at(s, r) = v;
            }

        // The scalar blocks contribute w2_sum * vec(I)vec(I)^T, which blows
        // up like 1/mu near a guess-regime optimum. Rotating the diagonal
        // coordinates so the identity direction becomes the first axis lands
        // that term on a single diagonal entry; Cholesky then eliminates the
        // stiff pivot first and the solve stays backward stable however
        // large w2_sum grows.
        std::vector<double> hv;
        if (nsca > 0 && n > 1) {
            hv.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
            hv[0] -= 1.0;
            double nrm = 0.0;
            for (double v : hv) nrm += v * v;
            nrm = std::sqrt(nrm);
            for (double& v : hv) v /= nrm;
        }
        auto rotate = [&](std::vector<double>& vec) {
            if (hv.empty()) return;
            double dot = 0.0;
            for (int i = 0; i < n; ++i) dot += hv[i] * vec[i];
            dot *= 2.0;
            for (int i = 0; i < n; ++i) vec[i] -= dot * hv[i];
        };
        if (!hv.empty()) {
            std::vector<double> col(n);
            for (int s = 0; s < d; ++s) {
                for (int i = 0; i < n; ++i) col[i] = schur.at(i, s);
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += hv[i] * col[i];
                dot *= 2.0;
                for (int i = 0; i < n; ++i) schur.at(i, s) = col[i] - dot * hv[i];
            }
            for (int r = 0; r < d; ++r) {
                for (int i = 0; i < n; ++i) col[i] = schur.at(r, i);
                double dot = 0.0;
                for (int i = 0; i < n; ++i) dot += hv[i] * col[i];
                dot *= 2.0;
                for (int i = 0; i < n; ++i) schur.at(r, i) = col[i] - dot * hv[i];
            }
        }
        if (nsca > 0) schur.at(0, 0) += w2_sum * n;

        RealMat factor = schur;
        bool ok = cholesky_factor(factor);
        if (!ok) {
            double dmax = 0.0;
            for (int r = (nsca > 0 ? 1 : 0); r < d; ++r)
                dmax = std::max(dmax, schur.at(r, r));
            double jitter = 1e-14 * std::max(dmax, 1e-30);
            for (int attempt = 0; attempt < 6 && !ok; ++attempt) {
                factor = schur;
                for (int r = 0; r < d; ++r) factor.at(r, r) += jitter;
                ok = cholesky_factor(factor);
                jitter *= 100.0;
            }
            if (!ok) break;
        }

        // shared pieces independent of the centering target
        CMat g_fixed(n);
        g_fixed -= rp;
        for (int k = 0; k < nmat; ++k)
            g_fixed -= hermitize(sc[k].w * rd[k] * sc[k].w);
        {
            double t = 0.0;
            for (int j = 0; j < nsca; ++j) t += w2[j] * rds[j];
            for (int i = 0; i < n; ++i) g_fixed.at(i, i) -= t;
        }

        auto solve_direction = [&](const std::vector<CMat>& rc,
                                   const std::vector<double>& rcs, CMat& du,
                                   std::vector<CMat>& dx, std::vector<double>& dlam,
                                   std::vector<CMat>& dz, std::vector<double>& dzs) {
            CMat g = g_fixed;
            for (int k = 0; k < nmat; ++k) g += rc[k];
            {
                double t = 0.0;
                for (int j = 0; j < nsca; ++j) t += rcs[j];
                for (int i = 0; i < n; ++i) g.at(i, i) += t;
            }
            std::vector<double> rhs(d);
            herm_to_vec(g, rhs);
            rotate(rhs);
            refined_solve(factor, schur, rhs);
            rotate(rhs);
            du = vec_to_herm(n, rhs);
            const double trdu = trace(du).real();
            dx.resize(nmat);
            dz.resize(nmat);
            dlam.resize(nsca);
            dzs.resize(nsca);
            for (int k = 0; k < nmat; ++k) {
                dz[k] = hermitize(du + rd[k]);
                dx[k] = hermitize(rc[k] - sc[k].w * dz[k] * sc[k].w);
            }
            for (int j = 0; j < nsca; ++j) {
                dzs[j] = trdu + rds[j];
                dlam[j] = rcs[j] - w2[j] * dzs[j];
            }
        };

        auto max_steps = [&](const std::vector<CMat>& dx,
                             const std::vector<double>& dlam,
                             const std::vector<CMat>& dz,
                             const std::vector<double>& dzs) {
            double ap = 1.0, ad = 1.0;
            for (int k = 0; k < nmat; ++k) {
                ap = std::min(ap, step_to_boundary(x[k], dx[k]));
                ad = std::min(ad, step_to_boundary(z[k], dz[k]));
            }
            for (int j = 0; j < nsca; ++j) {
                ap = std::min(ap, scalar_step_to_boundary(lam[j], dlam[j]));
                ad = std::min(ad, scalar_step_to_boundary(zs[j], dzs[j]));
            }
            return std::pair<double, double>(ap, ad);
        };

        // predictor (sigma = 0)
        std::vector<CMat> rc(nmat);
        std::vector<double> rcs(nsca);
        for (int k = 0; k < nmat; ++k) {
            rc[k] = x[k];
            rc[k] *= -1.0;
        }
        for (int j = 0; j < nsca; ++j) rcs[j] = -lam[j];
        CMat du;
        std::vector<CMat> dx, dz;
        std::vector<double> dlam, dzs;
        solve_direction(rc, rcs, du, dx, dlam, dz, dzs);
        auto [ap_aff, ad_aff] = max_steps(dx, dlam, dz, dzs);

        double mu_aff = 0.0;
        for (int k = 0; k < nmat; ++k) {
            CMat xa = x[k];
            CMat dxs = dx[k];
            dxs *= ap_aff;
            xa += dxs;
            CMat za = z[k];
            CMat dzsc = dz[k];
            dzsc *= ad_aff;
            za += dzsc;
            mu_aff += frob_inner(xa, za).real();
        }
        for (int j = 0; j < nsca; ++j)
            mu_aff += (lam[j] + ap_aff * dlam[j]) * (zs[j] + ad_aff * dzs[j]);
        mu_aff = std::max(mu_aff / nu, 0.0);
        double sigma = std::pow(mu_aff / mu, 3);
        sigma = std::clamp(sigma, 0.0, 1.0);
        // predictor-dominant endgame steps leave sqrt(mu) debris in the
        // products X Z; keeping some centering in the deep phase hands the
        // rounding a much cleaner iterate. Below the scaling's reliable
        // range the floor only blocks steps, so let Mehrotra take over.
        if (user_met && mu > 1e-9 * scale) sigma = std::max(sigma, 0.2);

        // corrector with adaptive centering
        const double target = sigma * mu;
        for (int k = 0; k < nmat; ++k) {
            rc[k] = sc[k].zinv;
            rc[k] *= target;
            rc[k] -= x[k];
        }
        for (int j = 0; j < nsca; ++j) rcs[j] = target / zs[j] - lam[j];
        solve_direction(rc, rcs, du, dx, dlam, dz, dzs);
        auto [ap_max, ad_max] = max_steps(dx, dlam, dz, dzs);

        double gamma = 0.98;
        if (mu < 1e-7 * scale) gamma = 0.995;
        if (mu < 1e-10 * scale) gamma = 0.999;
        const double ap = std::min(1.0, gamma * ap_max);
        const double ad = std::min(1.0, gamma * ad_max);
        if (ap < 1e-10 && ad < 1e-10) {
            if (++stall >= (user_met ? 6 : 20)) break;
        }

        for (int k = 0; k < nmat; ++k) {
            dx[k] *= ap;
            x[k] = hermitize(x[k] + dx[k]);
            dz[k] *= ad;
            z[k] = hermitize(z[k] + dz[k]);
        }
        for (int j = 0; j < nsca; ++j) {
            lam[j] += ap * dlam[j];
            zs[j] += ad * dzs[j];
        }
        du *= ad;
        u = hermitize(u + du);
        if (iter == max_iter) break;
    }

    // stalled or hit the cap: hand back the deepest accepted iterate
    if (user_met) return user_sol;
    if (!std::isfinite(best_score)) return record(max_iter, false);
    return best;
}

// Move a converged iterate onto the complementary face identified by the
// dual. Path following leaves sqrt(gap)-sized cross terms in the products
// (U - C_k) X_k, which is exactly what certificate verification measures;
// projecting each block onto the kernel of its dual slack removes them.
// Alternating projections restore the partition, and the value moves only
// by dual-slack-weighted mass because the identity components cancel across
// blocks. Falls back to the unrounded iterate when any guard trips.
void round_to_face(const ConeProgram& prog, ConeSolution& s, double tol) {
    const int n = prog.n;
    const int nmat = static_cast<int>(prog.mat_cost.size());
    const int nsca = static_cast<int>(prog.scalar_cost.size());
    const double tru = trace(s.u).real();
    const double scale = std::max(1.0, std::abs(tru));

    std::vector<CMat> zslack;
    zslack.reserve(nmat);
    double pval_pre = 0.0;
    double slack_pre = 0.0;
    for (int k = 0; k < nmat; ++k) {
        zslack.push_back(hermitize(s.u - prog.mat_cost[k]));
        pval_pre += frob_inner(prog.mat_cost[k], s.x[k]).real();
        slack_pre = std::max(slack_pre, frob_norm(zslack[k] * s.x[k]));
    }
    for (int j = 0; j < nsca; ++j) pval_pre += prog.scalar_cost[j] * s.lam[j];

    // kernel basis of each dual slack; generous thresholds are safe because
    // mass on moderate eigenvalues is already gap-limited
    std::vector<CMat> basis(nmat, CMat(n));
    std::vector<int> kdim(nmat, 0);
    for (int k = 0; k < nmat; ++k) {
        const EigenSystem es = eigen_hermitian(zslack[k]);
        const double theta =
            std::max(1e-6 * scale, 1e-3 * std::abs(es.values.back()));
        int c = 0;
        for (int r = 0; r < n; ++r) {
            if (es.values[r] > theta) continue;
            for (int i = 0; i < n; ++i) basis[k].at(i, c) = es.vectors.at(i, r);
            ++c;
        }
        kdim[k] = c;
    }
    std::vector<char> free_sc(nsca, 0);
    int nfree = 0;
    for (int j = 0; j < nsca; ++j) {
        free_sc[j] = (tru - prog.scalar_cost[j] <= 3e-7 * scale) ? 1 : 0;
        nfree += free_sc[j];
    }

    std::vector<CMat> x = s.x;
    std::vector<double> lam(nsca, 0.0);
    for (int j = 0; j < nsca; ++j)
        if (free_sc[j]) lam[j] = std::max(s.lam[j], 0.0);

    // restrict each block to its kernel subspace
    std::vector<CMat> proj(nmat, CMat(n));
    for (int k = 0; k < nmat; ++k) {
        CMat p(n);
        for (int a = 0; a < kdim[k]; ++a)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    p.at(i, j) +=
                        basis[k].at(i, a) * std::conj(basis[k].at(j, a));
        proj[k] = hermitize(p);
        x[k] = hermitize(proj[k] * x[k] * proj[k]);
    }

    // The partition defect is removed exactly by a Hermitian multiplier M
    // solving sum_k P_k M P_k + nfree tr(M) I = R. PSD stays inactive
    // because the blocks are strictly positive on their supports, so one
    // small linear solve replaces slow alternating projections; clip rounds
    // catch any stragglers.
    const int d = n * n;
    RealMat amat(d);
    {
        std::vector<double> unit(d, 0.0), col(d);
        for (int sidx = 0; sidx < d; ++sidx) {
            unit.assign(d, 0.0);
            unit[sidx] = 1.0;
            const CMat es = vec_to_herm(n, unit);
            CMat acc(n);
            for (int k = 0; k < nmat; ++k)
                acc += hermitize(proj[k] * es * proj[k]);
            if (nfree > 0 && sidx < n)
                for (int i = 0; i < n; ++i)
                    acc.at(i, i) += static_cast<double>(nfree);
            herm_to_vec(acc, col);
            for (int r = 0; r < d; ++r) amat.at(r, sidx) = col[r];
        }
    }
    for (int r = 0; r < d; ++r)
        for (int c = r + 1; c < d; ++c) {
            const double v = 0.5 * (amat.at(r, c) + amat.at(c, r));
            amat.at(r, c) = v;
            amat.at(c, r) = v;
        }
    // the map can be singular when the faces are small; a tiny ridge picks
    // the least-norm multiplier and later rounds absorb the bias
    double dmax = 0.0;
    for (int r = 0; r < d; ++r) dmax = std::max(dmax, amat.at(r, r));
    RealMat afac(d);
    bool ok = false;
    double jitter = 1e-12 * std::max(dmax, 1e-30);
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
        afac = amat;
        for (int r = 0; r < d; ++r) afac.at(r, r) += jitter;
        ok = cholesky_factor(afac);
        jitter *= 100.0;
    }
    if (!ok) return;

    std::vector<double> rvec(d);
    auto partition_fix = [&](const RealMat& fac, const std::vector<CMat>& sand,
                             double gsum) {
        CMat resid = CMat::identity(n);
        double lam_sum = 0.0;
        for (int j = 0; j < nsca; ++j) lam_sum += lam[j];
        for (int k = 0; k < nmat; ++k) resid -= x[k];
        for (int i = 0; i < n; ++i) resid.at(i, i) -= lam_sum;
        herm_to_vec(resid, rvec);
        cholesky_solve(fac, rvec);
        const CMat m = vec_to_herm(n, rvec);
        const double trm = trace(m).real();
        for (int k = 0; k < nmat; ++k)
            x[k] = hermitize(x[k] + sand[k] * m * sand[k]);
        if (nfree > 0)
            for (int j = 0; j < nsca; ++j)
                if (free_sc[j]) lam[j] += (gsum / nfree) * trm;
    };
    auto clip_blocks = [&]() {
        double clipped = 0.0;
        for (int k = 0; k < nmat; ++k) {
            const EigenSystem ex = eigen_hermitian(x[k]);
            std::vector<double> vals(ex.values);
            bool any = false;
            for (double& v : vals)
                if (v < 0.0) {
                    clipped -= v;
                    v = 0.0;
                    any = true;
                }
            if (any) x[k] = eigen_assemble(ex.vectors, vals);
        }
        for (int j = 0; j < nsca; ++j)
            if (lam[j] < 0.0) {
                clipped += -lam[j];
                lam[j] = 0.0;
            }
        return clipped;
    };

    // the in-face fix takes the representable part of the defect; null
    // directions of the ridge solve never reach the blocks
    partition_fix(afac, proj, static_cast<double>(nfree));
    clip_blocks();

    // The kernel-to-range cross mass dropped by the compression is not
    // representable on the faces. Restore the partition exactly through a
    // multiplier weighted by inverse dual slack, which prices each direction
    // by the certificate cost of putting mass there.
    const double delta = 1e-3 * scale;
    std::vector<CMat> hmat(nmat);
    for (int k = 0; k < nmat; ++k) {
        const EigenSystem es = eigen_hermitian(zslack[k]);
        std::vector<double> vals(es.values);
        for (double& v : vals) v = 1.0 / (std::max(v, 0.0) + delta);
        hmat[k] = eigen_assemble(es.vectors, vals);
    }
    double gsum = 0.0;
    for (int j = 0; j < nsca; ++j)
        if (free_sc[j])
            gsum += 1.0 / (std::max(tru - prog.scalar_cost[j], 0.0) + delta);
    RealMat amat2(d);
    {
        std::vector<double> unit(d, 0.0), col(d);
        for (int sidx = 0; sidx < d; ++sidx) {
            unit.assign(d, 0.0);
            unit[sidx] = 1.0;
            const CMat es = vec_to_herm(n, unit);
            CMat acc(n);
            for (int k = 0; k < nmat; ++k)
                acc += hermitize(hmat[k] * es * hmat[k]);
            if (gsum > 0.0 && sidx < n)
                for (int i = 0; i < n; ++i) acc.at(i, i) += gsum;
            herm_to_vec(acc, col);
            for (int r = 0; r < d; ++r) amat2.at(r, sidx) = col[r];
        }
    }
    for (int r = 0; r < d; ++r)
        for (int c = r + 1; c < d; ++c) {
            const double v = 0.5 * (amat2.at(r, c) + amat2.at(c, r));
            amat2.at(r, c) = v;
            amat2.at(c, r) = v;
        }
    RealMat afac2 = amat2;
    if (!cholesky_factor(afac2)) return;
    partition_fix(afac2, hmat, gsum);
    if (clip_blocks() > 1e-14 * scale) partition_fix(afac2, hmat, gsum);

    // guards: the partition must be exact, the blocks essentially PSD, the
    // value within gap-sized slip, and the slack genuinely improved
    CMat resid = CMat::identity(n);
    double lam_sum = 0.0;
    for (int j = 0; j < nsca; ++j) lam_sum += lam[j];
    for (int k = 0; k < nmat; ++k) resid -= x[k];
    for (int i = 0; i < n; ++i) resid.at(i, i) -= lam_sum;

    double pval_post = 0.0;
    double slack_post = 0.0;
    double neg = 0.0;
    for (int k = 0; k < nmat; ++k) {
        pval_post += frob_inner(prog.mat_cost[k], x[k]).real();
        slack_post = std::max(slack_post, frob_norm(zslack[k] * x[k]));
        neg = std::max(neg, -eigen_hermitian(x[k]).values.front());
    }
    for (int j = 0; j < nsca; ++j) {
        pval_post += prog.scalar_cost[j] * lam[j];
        neg = std::max(neg, -lam[j]);
    }

    const double allow_drop = std::max({4e-9 * scale, 10.0 * std::abs(s.gap),
                                        1e-2 * slack_pre});
    if (frob_norm(resid) <= 1e-10 * scale && neg <= 1e-10 * scale &&
        pval_post >= pval_pre - allow_drop && tru - pval_post <= 0.9 * tol &&
        slack_post <= std::max(1e-8 * scale, slack_pre)) {
        s.x = std::move(x);
        s.lam = std::move(lam);
        s.primal_value = pval_post;
        s.gap = tru - pval_post;
    }
}

// Spread the (tiny) identity-resolution drift over the matrix blocks so the
// extracted POVM sums to the identity at rounding level.
void polish_partition(const ConeProgram& prog, ConeSolution& s) {
    const int n = prog.n;
    CMat rp = CMat::identity(n);
    double lam_sum = 0.0;
    for (double l : s.lam) lam_sum += l;
    for (const CMat& xk : s.x) rp -= xk;
    for (int i = 0; i < n; ++i) rp.at(i, i) -= lam_sum;
    rp *= 1.0 / static_cast<double>(s.x.size());
    for (CMat& xk : s.x) xk = hermitize(xk + rp);
}

void check_tol(double tol) {
    if (!(tol > 0.0) || tol > 1e-4)
        throw ValidationError("tolerance must lie in (0, 1e-4]");
}

}  // namespace

DesignSolution solve_nominal(const DetectionProblem& problem, double tol) {
    check_tol(tol);
    ConeProgram prog;
    prog.n = problem.dim();
    const int m = problem.size();
    for (int i = 0; i < m; ++i) {
        CMat c = problem.states()[i].mat();
        c *= problem.priors()[i];
        prog.mat_cost.push_back(std::move(c));
    }
    ConeSolution cone = solve_cone(prog, tol, 10000);
    round_to_face(prog, cone, tol);
    polish_partition(prog, cone);

    std::vector<HermitianOperator> ops;
    ops.reserve(m);
    for (int i = 0; i < m; ++i) ops.emplace_back(cone.x[i]);
    Povm povm(std::move(ops));

    double value = 0.0;
    for (int i = 0; i < m; ++i)
        value += problem.priors()[i] *
                 trace_inner(povm[i], problem.states()[i].op());
    HermitianOperator dual{cone.u};
    return DesignSolution{std::move(povm), value, dual,
                          dual.trace() - value, cone.iterations, cone.converged};
}

WorstCaseSolution solve_worst_case_program(const UncertainEnsemble& ensemble,
                                           double tol) {
    check_tol(tol);
    ConeProgram prog;
    prog.n = ensemble.dim();
    const int m = ensemble.size();
    for (int i = 0; i < m; ++i) {
        CMat c = ensemble.states()[i].mat();
        c *= ensemble.priors()[i] * ensemble.bounds()[i];
        prog.mat_cost.push_back(std::move(c));
        prog.scalar_cost.push_back(ensemble.priors()[i]);
    }
    ConeSolution cone = solve_cone(prog, tol, 10000);
    round_to_face(prog, cone, tol);
    polish_partition(prog, cone);

    std::vector<HermitianOperator> ops;
    ops.reserve(m);
    for (int i = 0; i < m; ++i) {
        CMat pi = cone.x[i];
        for (int r = 0; r < prog.n; ++r) pi.at(r, r) += cone.lam[i];
        ops.emplace_back(pi);
    }
    Povm povm(std::move(ops));

    double value = 0.0;
    for (int i = 0; i < m; ++i) {
        const double p = ensemble.priors()[i];
        const double q = ensemble.bounds()[i];
        value += p * (q * trace_inner(povm[i], ensemble.states()[i].op()) +
                      (1.0 - q) * cone.lam[i]);
    }
    HermitianOperator dual{cone.u};
    const double tru = dual.trace();

    std::vector<HermitianOperator> zmult;
    std::vector<double> wmult;
    for (int i = 0; i < m; ++i) {
        zmult.emplace_back(hermitize(cone.u - prog.mat_cost[i]));
        wmult.push_back(tru - ensemble.priors()[i]);
    }
    return WorstCaseSolution{std::move(povm), std::move(cone.lam),
                             value,           dual,
                             std::move(zmult), std::move(wmult),
                             tru - value,     cone.iterations,
                             cone.converged};
}

CertificateReport verify_nominal_certificate(const DetectionProblem& problem,
                                             const DesignSolution& solution,
                                             double tol) {
    if (solution.povm.dim() != problem.dim() ||
        solution.povm.size() != problem.size() ||
        solution.dual.dim() != problem.dim())
        throw DimensionError("solution does not match problem shape");

    CertificateReport report;
    report.tol = tol;
    report.pass = true;
    for (int i = 0; i < problem.size(); ++i) {
        CMat diff = solution.dual.mat();
        CMat scaled = problem.states()[i].mat();
        scaled *= problem.priors()[i];
        diff -= scaled;
        diff = hermitize(diff);
        const double margin = eigen_hermitian(diff).values.front();
        const double residual = frob_norm(diff * solution.povm[i].mat());
        report.state_margins.push_back(margin);
        report.slack_residuals.push_back(residual);
        if (margin < -tol || residual > tol) report.pass = false;
    }
    return report;
}

CertificateReport verify_worst_case_certificate(
    const UncertainEnsemble& ensemble, const WorstCaseSolution& solution,
    double tol) {
    const int m = ensemble.size();
    const int n = ensemble.dim();
    if (solution.povm.dim() != n || solution.povm.size() != m ||
        solution.dual.dim() != n ||
        static_cast<int>(solution.bounds.size()) != m)
        throw DimensionError("solution does not match ensemble shape");

    CertificateReport report;
    report.tol = tol;
    report.pass = true;
    const double tru = solution.dual.trace();
    for (int i = 0; i < m; ++i) {
        CMat zi = solution.dual.mat();
        CMat scaled = ensemble.states()[i].mat();
        scaled *= ensemble.priors()[i] * ensemble.bounds()[i];
        zi -= scaled;
        zi = hermitize(zi);

        CMat excess = solution.povm[i].mat();
        for (int r = 0; r < n; ++r) excess.at(r, r) -= solution.bounds[i];

        const double state_margin = eigen_hermitian(zi).values.front();
        const double slack = frob_norm(zi * excess);
        const double povm_margin = eigen_hermitian(excess).values.front();
        const double bound_margin = solution.bounds[i];
        const double trace_margin = tru - ensemble.priors()[i];
        const double scalar_resid = std::abs(trace_margin * solution.bounds[i]);

        report.state_margins.push_back(state_margin);
        report.slack_residuals.push_back(slack);
        report.povm_margins.push_back(povm_margin);
        report.bound_margins.push_back(bound_margin);
        report.trace_margins.push_back(trace_margin);
        report.scalar_residuals.push_back(scalar_resid);
        if (state_margin < -tol || slack > tol || povm_margin < -tol ||
            bound_margin < -tol || trace_margin < -tol || scalar_resid > tol)
            report.pass = false;
    }
    return report;
}

double two_state_oracle(const DensityOperator& rho_a,
                        const DensityOperator& rho_b, double p_a, double p_b) {
    if (rho_a.dim() != rho_b.dim())
        throw DimensionError("two-state oracle: dimension mismatch");
    if (p_a < 0.0 || p_b < 0.0 || std::abs(p_a + p_b - 1.0) > 1e-10)
        throw ValidationError("two-state oracle needs priors summing to one");
    CMat diff = rho_a.mat();
    diff *= p_a;
    CMat sb = rho_b.mat();
    sb *= p_b;
    diff -= sb;
    double tracenorm = 0.0;
    for (double v : eigen_hermitian(diff).values) tracenorm += std::abs(v);
    return 0.5 * (1.0 + tracenorm);
}

double brute_force_oracle(const DetectionProblem& problem, int grid_density) {
    if (problem.dim() != 2 || problem.size() != 2)
        throw ValidationError("brute-force oracle handles two qubit states only");
    if (grid_density < 1)
        throw ValidationError("grid density must be at least 1");
    const double p0 = problem.priors()[0];
    const double p1 = problem.priors()[1];
    CMat m = problem.states()[0].mat();
    m *= p0;
    CMat s1 = problem.states()[1].mat();
    s1 *= p1;
    m -= s1;

    // Bloch coordinates of the Hermitian weighting operator
    const double m0 = (m.at(0, 0) + m.at(1, 1)).real();
    const double mx = 2.0 * m.at(0, 1).real();
    const double my = -2.0 * m.at(0, 1).imag();
    const double mz = (m.at(0, 0) - m.at(1, 1)).real();

    double best = std::max(p0, p1);  // the two guess assignments
    const double pi = std::acos(-1.0);
    for (int i = 0; i <= grid_density; ++i) {
        const double theta = pi * i / grid_density;
        const double ct = std::cos(theta), st = std::sin(theta);
        for (int j = 0; j < grid_density; ++j) {
            const double phi = 2.0 * pi * j / grid_density;
            const double ndotm =
                st * std::cos(phi) * mx + st * std::sin(phi) * my + ct * mz;
            best = std::max(best, p1 + 0.5 * (m0 + ndotm));
        }
    }
    return best;
}

}  // namespace qdetect
