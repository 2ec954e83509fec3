#include "wamg/quality.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "wamg/dense.hpp"
#include "wamg/rng.hpp"

namespace wamg {

CoarseProjector::CoarseProjector(const DiagonalMatrix& D, const Prolongator& P)
    : D_(D), P_(P.P), n_c_(P.n_c) {
    coarse_diag_inv_.assign(static_cast<std::size_t>(n_c_), 0.0);
    for (index_t i = 0; i < P_.n; ++i) {
        for (index_t k = P_.row_ptr[i]; k < P_.row_ptr[i + 1]; ++k) {
            const index_t c = P_.col_idx[k];
            coarse_diag_inv_[c] += P_.values[k] * P_.values[k] * D_.entries[i];
        }
    }
    for (double& d : coarse_diag_inv_) {
        if (!(d > 0.0)) throw std::runtime_error("CoarseProjector: P'DP not positive");
        d = 1.0 / d;
    }
}

Vec CoarseProjector::apply_Q(const Vec& x) const {
    Vec dx = D_.apply(x);
    Vec c = spmv_transpose(P_, n_c_, dx);
    for (index_t j = 0; j < n_c_; ++j) c[j] *= coarse_diag_inv_[j];
    return spmv_rect(P_, n_c_, c);
}

Vec CoarseProjector::apply_Qt(const Vec& y) const {
    Vec c = spmv_transpose(P_, n_c_, y);
    for (index_t j = 0; j < n_c_; ++j) c[j] *= coarse_diag_inv_[j];
    return D_.apply(spmv_rect(P_, n_c_, c));
}

Vec CoarseProjector::apply_S(const Vec& x) const {
    Vec qx = apply_Q(x);
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = D_.entries[i] * (x[i] - qx[i]);
    return y;
}

MuResult mu_global(const SparseMatrix& A, const DiagonalMatrix& D, const Prolongator& P,
                   double tol, index_t dense_cap, std::uint64_t seed) {
    CoarseProjector proj(D, P);
    MuResult out;
    if (A.n <= dense_cap) {
        // assemble S = D(I-Q) densely and use the direct solver
        DenseMatrix S(A.n, A.n);
        Vec e(static_cast<std::size_t>(A.n), 0.0);
        for (index_t j = 0; j < A.n; ++j) {
            e[j] = 1.0;
            Vec col = proj.apply_S(e);
            for (index_t i = 0; i < A.n; ++i) S(i, j) = col[i];
            e[j] = 0.0;
        }
        // symmetrize roundoff
        for (index_t i = 0; i < A.n; ++i)
            for (index_t j = i + 1; j < A.n; ++j) {
                const double v = 0.5 * (S(i, j) + S(j, i));
                S(i, j) = v;
                S(j, i) = v;
            }
        SymmetricEig eig = generalized_symmetric_eig(S, DenseMatrix::from_sparse(A));
        out.mu_inv = std::max(0.0, eig.eigenvalues[A.n - 1]);
        out.worst_vector.assign(static_cast<std::size_t>(A.n), 0.0);
        for (index_t i = 0; i < A.n; ++i) out.worst_vector[i] = eig.vectors(i, A.n - 1);
        const double nn = norm2(out.worst_vector);
        if (nn > 0) scale(out.worst_vector, 1.0 / nn);
        return out;
    }
    LinOp S = [&proj](const Vec& x) { return proj.apply_S(x); };
    EigPair p = largest_generalized_eig_sparse(S, A, tol, 400, seed);
    out.mu_inv = p.value;
    out.worst_vector = std::move(p.vector);
    return out;
}

ProjectorDiagnostics q_projector_check(const DiagonalMatrix& D, const Prolongator& P,
                                       int n_samples, std::uint64_t seed) {
    CoarseProjector proj(D, P);
    ProjectorDiagnostics out;
    const std::size_t n = D.entries.size();
    for (int s = 0; s < n_samples; ++s) {
        Vec v = random_vector(n, seed + static_cast<std::uint64_t>(s));
        Vec qv = proj.apply_Q(v);
        Vec qqv = proj.apply_Q(qv);
        Vec dqv = D.apply(qv);
        Vec qtdv = proj.apply_Qt(D.apply(v));
        for (std::size_t i = 0; i < n; ++i) {
            out.max_idempotency_dev = std::max(out.max_idempotency_dev, std::fabs(qqv[i] - qv[i]));
            out.max_selfadjoint_dev = std::max(out.max_selfadjoint_dev,
                                               std::fabs(dqv[i] - qtdv[i]));
        }
        // Q fixes its range: compare Q(Ph) with Ph for random coarse h
        Vec h = random_vector(static_cast<std::size_t>(P.n_c),
                              seed + 1000 + static_cast<std::uint64_t>(s));
        Vec ph = spmv_rect(P.P, P.n_c, h);
        Vec qph = proj.apply_Q(ph);
        for (std::size_t i = 0; i < n; ++i)
            out.max_fix_dev = std::max(out.max_fix_dev, std::fabs(qph[i] - ph[i]));
    }
    return out;
}

namespace {

struct BlockData {
    std::vector<index_t> nodes;
    DenseMatrix block;  // A restricted to the aggregate, minus delta*I
    double delta = 0.0;
};

double smallest_eig_sparse_or_dense(const SparseMatrix& M, index_t dense_cap) {
    if (M.n <= dense_cap) {
        SymmetricEig eig = symmetric_eig(DenseMatrix::from_sparse(M));
        return eig.eigenvalues[0];
    }
    SpectrumBounds b = symmetric_lanczos_extremes(as_op(M), M.n, 300, 1e-9);
    return b.lo;
}

} // namespace

LocalBoundResult local_bound(const SparseMatrix& A, const AggregateSet& agg,
                             const DiagonalMatrix& D, const SparseMatrix& P_total,
                             const std::vector<double>& delta_policy, index_t agg_cap,
                             index_t dense_cap) {
    LocalBoundResult out;
    const double psd_tol = 1e-10 * std::max(1.0, A.norm_inf());

    for (const auto& g : agg.aggregates)
        if (static_cast<index_t>(g.size()) > agg_cap)
            throw std::invalid_argument("local_bound: aggregate larger than cap");

    // coarse column restricted to each aggregate (kernel candidate)
    std::vector<Vec> coarse_vec(agg.aggregates.size());
    for (index_t a = 0; a < agg.count(); ++a) {
        const auto& g = agg.aggregates[a];
        coarse_vec[a].resize(g.size());
        for (std::size_t q = 0; q < g.size(); ++q) {
            const index_t i = g[q];
            const index_t k = P_total.row_ptr[i];
            coarse_vec[a][q] = k < P_total.row_ptr[i + 1] ? P_total.values[k] : 0.0;
        }
    }

    std::string last_reason;
    for (double t : delta_policy) {
        bool ok = true;
        std::vector<AggregateBound> per;
        per.reserve(agg.aggregates.size());
        std::vector<double> deltas(agg.aggregates.size(), 0.0);

        for (index_t a = 0; a < agg.count() && ok; ++a) {
            const auto& g = agg.aggregates[a];
            AggregateBound ab;
            ab.aggregate = a;
            if (g.size() == 1) {
                ab.lambda1 = ab.lambda2 = 1.0;
                ab.mu_lo = ab.mu_hi = ab.contribution = 1.0;
                per.push_back(ab);
                continue; // singleton blocks stay untouched (delta = 0)
            }
            const index_t m = static_cast<index_t>(g.size());
            DenseMatrix block(m, m);
            DenseMatrix Dj(m, m);
            for (index_t r = 0; r < m; ++r) {
                for (index_t c = 0; c < m; ++c) block(r, c) = A.at(g[r], g[c]);
                Dj(r, r) = D.entries[g[r]];
            }
            double min_rowsum = std::numeric_limits<double>::infinity();
            for (index_t r = 0; r < m; ++r) {
                double s = 0.0;
                for (index_t c = 0; c < m; ++c) s += block(r, c);
                min_rowsum = std::min(min_rowsum, s);
            }
            const double delta = t * min_rowsum;
            deltas[a] = delta;
            for (index_t r = 0; r < m; ++r) block(r, r) -= delta;

            // block must be symmetric nonnegative definite
            SymmetricEig std_eig = symmetric_eig(block);
            if (std_eig.eigenvalues[0] < -psd_tol) {
                ok = false;
                last_reason = "block not PSD at delta factor " + std::to_string(t);
                break;
            }

            SymmetricEig gen = generalized_symmetric_eig(block, Dj);
            const double l1 = gen.eigenvalues[0];
            const double l2 = m > 1 ? gen.eigenvalues[1] : l1;
            ab.lambda1 = l1;
            ab.lambda2 = l2;
            const double kernel_tol = 1e-8 * std::max(1.0, gen.eigenvalues[m - 1]);

            if (l1 > kernel_tol) {
                ab.contribution = 1.0 / l1;
                ab.mu_hi = 1.0 / l1;
                ab.mu_lo = l2 > kernel_tol ? 1.0 / l2 : ab.mu_hi;
            } else {
                // singular block: admissible only if the kernel is the coarse
                // direction; the bound is then exactly 1/lambda2
                if (l2 <= kernel_tol) {
                    ok = false;
                    last_reason = "block kernel dimension > 1 at delta factor " +
                                  std::to_string(t);
                    break;
                }
                const Vec& u = coarse_vec[a];
                double rn = 0.0, scale_ref = 0.0;
                for (index_t rr = 0; rr < m; ++rr) {
                    double s = 0.0;
                    for (index_t cc = 0; cc < m; ++cc) s += block(rr, cc) * u[cc];
                    s -= l1 * Dj(rr, rr) * u[rr];
                    rn += s * s;
                    scale_ref = std::max(scale_ref, std::fabs(Dj(rr, rr)));
                }
                if (std::sqrt(rn) > 1e-7 * std::max(1.0, scale_ref)) {
                    ok = false;
                    last_reason = "block kernel not spanned by the coarse vector at delta "
                                  "factor " + std::to_string(t);
                    break;
                }
                ab.contribution = 1.0 / l2;
                ab.mu_lo = ab.mu_hi = 1.0 / l2;
            }
            per.push_back(ab);
        }
        if (!ok) continue;

        // remainder A_R = A - blkdiag(block_j): zero in-aggregate couplings,
        // diagonal replaced by delta_j
        SparseMatrix R = A;
        for (index_t i = 0; i < A.n; ++i) {
            const index_t a = agg.agg_of[i];
            const bool singleton = agg.aggregates[a].size() == 1;
            for (index_t k = R.row_ptr[i]; k < R.row_ptr[i + 1]; ++k) {
                const index_t j = R.col_idx[k];
                if (agg.agg_of[j] != a) continue;
                if (singleton) {
                    R.values[k] = 0.0; // block keeps the full diagonal entry
                } else {
                    R.values[k] = (j == i) ? deltas[a] : 0.0;
                }
            }
        }
        const double lam_min = smallest_eig_sparse_or_dense(R, dense_cap);
        if (lam_min < -psd_tol) {
            last_reason = "remainder not PSD at delta factor " + std::to_string(t) +
                          " (smallest eigenvalue " + std::to_string(lam_min) + ")";
            continue;
        }

        out.available = true;
        out.splitting_verified = true;
        out.delta_factor = t;
        out.per_aggregate = std::move(per);
        out.bound = 0.0;
        for (const auto& ab : out.per_aggregate) out.bound = std::max(out.bound, ab.contribution);
        return out;
    }

    out.available = false;
    out.splitting_verified = false;
    out.detail = last_reason.empty() ? "no admissible splitting" : last_reason;
    return out;
}

CrResult cr_ratio(const SparseMatrix& A, const ComplementProlongator& comp,
                  const DiagonalMatrix& M, double tol, index_t dense_cap, std::uint64_t seed) {
    CrResult out;
    if (comp.n_p == 0) {
        out.no_pairs = true;
        out.rho_f = 0.0;
        return out;
    }
    SparseMatrix A_ff = galerkin_product(comp.P_f, comp.n_p, A);
    Vec m_ff(static_cast<std::size_t>(comp.n_p), 0.0);
    for (index_t i = 0; i < comp.P_f.n; ++i)
        for (index_t k = comp.P_f.row_ptr[i]; k < comp.P_f.row_ptr[i + 1]; ++k)
            m_ff[comp.P_f.col_idx[k]] += comp.P_f.values[k] * comp.P_f.values[k] * M.entries[i];
    for (double d : m_ff)
        if (!(d > 0.0)) throw std::runtime_error("cr_ratio: M_ff not positive");

    // symmetrized iteration operator I - Mff^-1/2 Aff Mff^-1/2
    SparseMatrix C = A_ff;
    for (index_t i = 0; i < C.n; ++i) {
        const double si = 1.0 / std::sqrt(m_ff[i]);
        for (index_t k = C.row_ptr[i]; k < C.row_ptr[i + 1]; ++k)
            C.values[k] *= si / std::sqrt(m_ff[C.col_idx[k]]);
    }

    if (C.n <= dense_cap) {
        SymmetricEig eig = symmetric_eig(DenseMatrix::from_sparse(C));
        out.rho_f = std::max(std::fabs(1.0 - eig.eigenvalues[0]),
                             std::fabs(1.0 - eig.eigenvalues[C.n - 1]));
    } else {
        LinOp B = [&C](const Vec& x) {
            Vec y = spmv(C, x);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] - y[i];
            return y;
        };
        SpectrumBounds b = symmetric_lanczos_extremes(B, C.n, 500, tol, seed);
        out.rho_f = std::max(std::fabs(b.lo), std::fabs(b.hi));
    }
    if (out.rho_f >= 1.0 + 1e-9)
        throw std::runtime_error("cr_ratio: compatible relaxation not convergent (rho_f = " +
                                 std::to_string(out.rho_f) + ")");
    return out;
}

SymmetrizedSmoother::SymmetrizedSmoother(const SparseMatrix& A, const DiagonalMatrix& M)
    : A_(A), M_(M) {
    require_same_size(M.entries.size(), static_cast<std::size_t>(A.n), "SymmetrizedSmoother");
    // Rbar SPD iff rho(M^-1 A) < 2; probe the symmetrized operator
    LinOp Abar = [this](const Vec& x) {
        Vec y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] / std::sqrt(M_.entries[i]);
        y = spmv(A_, y);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] /= std::sqrt(M_.entries[i]);
        return y;
    };
    SpectrumBounds b = symmetric_lanczos_extremes(Abar, A.n, std::min<index_t>(A.n, 200), 1e-8);
    rho_ = b.hi;
    if (rho_ >= 2.0)
        throw std::runtime_error("SymmetrizedSmoother: rho(M^-1 A) >= 2, Rbar not SPD");
}

Vec SymmetrizedSmoother::apply_Rbar(const Vec& v) const {
    // 2 M^-1 v - M^-1 A M^-1 v
    Vec mv = M_.solve(v);
    Vec amv = spmv(A_, mv);
    Vec y = M_.solve(amv);
    for (std::size_t i = 0; i < v.size(); ++i) y[i] = 2.0 * mv[i] - y[i];
    return y;
}

Vec SymmetrizedSmoother::solve_Rbar(const Vec& v, double rtol) const {
    LinOp R = [this](const Vec& x) { return apply_Rbar(x); };
    // precondition with M (Rbar ~ M^-1 scale)
    LinOp prec = [this](const Vec& r) { return M_.apply(r); };
    CgResult res = cg_solve(R, v, rtol, 10000, prec);
    if (!res.converged) throw std::runtime_error("SymmetrizedSmoother: Rbar solve stalled");
    return res.x;
}

double epsilon_smoothness(const Vec& v, const SparseMatrix& A, const SymmetrizedSmoother& S) {
    if (norm2(v) == 0.0) throw std::invalid_argument("epsilon_smoothness: zero vector");
    const double num = dot(v, spmv(A, v));
    Vec z = S.solve_Rbar(v);
    const double den = dot(v, z);
    if (!(den > 0.0)) throw std::runtime_error("epsilon_smoothness: Rbar not SPD on input");
    return num / den;
}

TbarEigResult smallest_eigvec_Tbar(const SparseMatrix& A, const SymmetrizedSmoother& S,
                                   double tol, std::uint64_t seed) {
    // Tbar = Rbar A is similar to 2*Abar - Abar^2 with Abar = M^-1/2 A M^-1/2,
    // so its eigenvalues are f(a) = 2a - a^2 over the spectrum of Abar and an
    // eigenvector for eigenvalue a maps to the pencil eigenvector of (A, M).
    EigPair small = smallest_generalized_eig(A, S.M(), tol, 300, seed);
    const double a_min = small.value;
    const double a_max = S.rho_MinvA();
    auto f = [](double a) { return 2.0 * a - a * a; };

    TbarEigResult out;
    if (f(a_min) <= f(a_max) || a_max <= 1.0) {
        out.value = f(a_min);
        out.vector = std::move(small.vector);
    } else {
        // spectrum reaches beyond 1: the top end of Abar minimizes f; power
        // iteration on the shifted symmetric operator recovers its vector
        const std::size_t n = static_cast<std::size_t>(A.n);
        Vec u = random_vector(n, seed);
        scale(u, 1.0 / norm2(u));
        double a = 0.0;
        for (int it = 0; it < 2000; ++it) {
            Vec y(u.size());
            for (std::size_t i = 0; i < n; ++i) y[i] = u[i] / std::sqrt(S.M().entries[i]);
            y = spmv(A, y);
            for (std::size_t i = 0; i < n; ++i) y[i] /= std::sqrt(S.M().entries[i]);
            const double a_new = dot(u, y);
            scale(y, 1.0 / norm2(y));
            u = y;
            if (it > 2 && std::fabs(a_new - a) <= tol * std::fabs(a_new)) {
                a = a_new;
                break;
            }
            a = a_new;
        }
        out.value = f(a);
        out.vector.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.vector[i] = u[i] / std::sqrt(S.M().entries[i]);
    }
    const double nn = norm2(out.vector);
    scale(out.vector, 1.0 / nn);
    for (double x : out.vector) {
        if (x != 0.0) {
            if (x < 0.0) scale(out.vector, -1.0);
            break;
        }
    }
    return out;
}

} // namespace wamg
